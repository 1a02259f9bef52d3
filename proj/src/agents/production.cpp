#include "common.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <algorithm>

namespace storyreel::detail {

namespace {

class Animator final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kAnimator; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        const auto shot_id = params.at("shot_id").get<std::string>();
        const auto& keys = request.asset_refs("keyframes");
        if (keys.empty()) throw DependencyError("no keyframes for shot " + shot_id);

        CameraPlan camera;
        json keyframes = json::array(), identity = json::object();
        for (const auto& key : keys) {
            auto rec = ctx.memory.find(key);
            if (!rec) throw DependencyError("missing keyframe " + key);
            const auto& d = rec->meta.value("descriptor", json::object());
            camera.angles.push_back(d.value("angle", 30));
            camera.transitions.push_back(d.value("transition", std::string("cut")));
            const auto tokens = d.value("identity_tokens", json::object());
            for (const auto& [c, t] : tokens.items()) identity[c] = t;
            keyframes.push_back(rec->id());
        }

        const auto mix_id = params.value("mix_id", std::string{});
        std::optional<std::string> audio_id;
        const auto& audio = request.asset_refs("audio");
        const auto mix_key = asset_key(AssetTable::music, mix_id);
        if (!mix_id.empty() && std::find(audio.begin(), audio.end(), mix_key) != audio.end())
            if (ctx.memory.find(mix_key)) audio_id = mix_id;
        if (params.value("lip_sync", false) && !audio_id)
            throw DependencyError("lip-synced shot " + shot_id + " has no audio mix");

        TaskRequirements reqs;
        reqs.needs_identity = !identity.empty();
        reqs.style_tags = style_tags(ctx.memory, false);
        const auto tool = choose_tool(ctx, name(), request, reqs);
        const auto duration = ctx.seconds_per_panel * static_cast<double>(keys.size());
        auto asset = ctx.invoke(tool, "video_" + shot_id, "video",
                                {{"prompt", request.task->prompt},
                                 {"shot_id", shot_id},
                                 {"keyframes", keyframes},
                                 {"camera_plan", camera},
                                 {"audio_id", audio_id ? json(*audio_id) : json(nullptr)},
                                 {"duration", duration},
                                 {"identity_tokens", identity},
                                 {"style", reqs.style_tags}});

        AssetRecord rec;
        rec.table = AssetTable::video;
        rec.key_fields = {{"id", "video_" + shot_id},
                          {"prompt", request.task->prompt},
                          {"video_path", "assets/video/" + shot_id + ".mp4"},
                          {"shot_id", shot_id},
                          {"music_id", audio_id.value_or("")}};
        rec.meta = asset_meta(asset);

        AgentOutput out;
        out.records.push_back(std::move(rec));
        out.response = make_response(request, MessageStatus::success, {{"shot_id", shot_id}, {"video", asset}});
        return out;
    }
};

AssetRecord music_record(const MockAsset& asset, const std::string& character_id, const std::string& prompt) {
    AssetRecord rec;
    rec.table = AssetTable::music;
    rec.key_fields = {{"id", asset.asset_id},
                      {"character_id", character_id},
                      {"prompt", prompt},
                      {"music_path", "assets/audio/" + asset.asset_id + ".wav"}};
    rec.meta = asset_meta(asset);
    return rec;
}

class AudioProducer final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kAudio; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        const auto shot_id = params.at("shot_id").get<std::string>();
        const auto scene_id = params.value("scene_id", std::string{});
        const auto scene_prompt = params.value("scene_prompt", std::string{});
        const auto acoustic = style_tags(ctx.memory, true);

        AgentOutput out;
        json assets = json::array();
        std::vector<std::string> stems, stem_prompts;
        std::size_t n = 0;
        for (const auto& line : params.value("lines", json::array())) {
            const auto speaker = line.at("character_id").get<std::string>();
            const auto text = line.value("text", std::string{});
            auto character = ctx.memory.find(AssetTable::character, speaker);
            if (!character || character->key_fields.at("voice_prompt").empty())
                throw DependencyError("character " + speaker + " has no voice prompt");
            auto asset = ctx.invoke(named_tool(ctx, name(), "speaker_conditioned_tts"),
                                    "voice_" + shot_id + "_l" + two_digits(++n), "audio",
                                    {{"prompt", text},
                                     {"voice_prompt", character->key_fields.at("voice_prompt")},
                                     {"emotion", line.value("emotion", std::string("neutral"))},
                                     {"character_id", speaker},
                                     {"shot_id", shot_id}});
            out.records.push_back(music_record(asset, speaker, text));
            stems.push_back(asset_key(AssetTable::music, asset.asset_id));
            stem_prompts.push_back(text);
            assets.push_back(asset);
        }

        // One score per scene, shared by all its shots: seeded by scene, not attempt.
        auto music = ctx.invoke(named_tool(ctx, name(), "text_to_music"), "music_" + scene_id, "music",
                                {{"prompt", scene_prompt}, {"acoustic_style", acoustic}, {"scene_id", scene_id}},
                                false);
        out.records.push_back(music_record(music, "", scene_prompt));
        stems.push_back(asset_key(AssetTable::music, music.asset_id));
        stem_prompts.push_back(scene_prompt);
        assets.push_back(music);

        const auto mix_prompt = text::join(stem_prompts, " ");
        auto mix = ctx.invoke(named_tool(ctx, name(), "audio_mixer"), "mix_" + shot_id, "audio",
                              {{"prompt", mix_prompt}, {"stems", stems}, {"shot_id", shot_id}});
        auto mix_rec = music_record(mix, "", mix_prompt);
        mix_rec.meta["stems"] = stems;
        out.records.push_back(std::move(mix_rec));

        out.response = make_response(request, MessageStatus::success,
                                     {{"shot_id", shot_id},
                                      {"assets", assets},
                                      {"mix", {{"id", mix.asset_id}, {"stems", stems}, {"asset", mix}}}});
        return out;
    }
};

class VideoEditor final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kEditor; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        FinalManifest manifest;
        manifest.run_id = params.value("run_id", std::string{});
        json shot_ids = json::array();
        for (const auto& shot : params.value("shots", std::vector<std::string>{})) {
            auto video = ctx.memory.find(AssetTable::video, "video_" + shot);
            if (!video) throw DependencyError("missing video for shot " + shot);
            auto mix = ctx.memory.find(AssetTable::music, "mix_" + shot);
            if (!mix) throw DependencyError("missing audio for shot " + shot);

            ManifestEntry entry;
            entry.shot_id = shot;
            entry.video_ref = video->key();
            entry.audio_refs.push_back(mix->key());
            for (const auto& stem : mix->meta.value("stems", std::vector<std::string>{}))
                entry.audio_refs.push_back(stem);
            const auto plan = video->meta.value("descriptor", json::object()).value("camera_plan", json::object());
            const auto transitions = plan.value("transitions", std::vector<std::string>{});
            entry.transition = transitions.empty() ? "cut" : transitions.front();
            manifest.entries.push_back(std::move(entry));
            shot_ids.push_back(shot);
        }
        if (auto style = ctx.memory.find(AssetTable::style, kStyleId)) {
            manifest.styles.visual_style = split_tags(style->key_fields.at("visual_style"));
            manifest.styles.acoustic_style = split_tags(style->key_fields.at("acoustic_style"));
        }

        json transitions = json::array();
        for (const auto& e : manifest.entries) transitions.push_back(e.transition);
        auto cut = ctx.invoke(named_tool(ctx, name(), "multipass_encoder"), "final_cut", "video",
                              {{"prompt", request.task->prompt},
                               {"shot_ids", shot_ids},
                               {"transitions", transitions},
                               {"color_pipeline", named_tool(ctx, name(), "color_pipeline").name},
                               {"transition_effects", named_tool(ctx, name(), "transition_effects").name}});

        AgentOutput out;
        out.response = make_response(request, MessageStatus::success,
                                     {{"manifest", manifest}, {"final_cut", cut}, {"descriptor", cut.descriptor}});
        return out;
    }
};

} // namespace

std::shared_ptr<const Agent> make_animator() { return std::make_shared<Animator>(); }
std::shared_ptr<const Agent> make_audio_producer() { return std::make_shared<AudioProducer>(); }
std::shared_ptr<const Agent> make_video_editor() { return std::make_shared<VideoEditor>(); }

} // namespace storyreel::detail
