#include "common.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/segmenter.hpp"
#include "storyreel/text.hpp"

namespace storyreel::detail {

namespace {

class CharacterDesigner final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kCharacterDesigner; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        const auto id = params.at("character_id").get<std::string>();
        const auto display = params.value("name", id);
        const auto description = params.value("description", std::string{});
        const auto& prompt = request.task->prompt;
        const auto style = style_tags(ctx.memory, false);
        const auto token = sha256_hex(prompt + "|" + text::join(style, ",")).substr(0, 16);

        json views = json::object(), assets = json::array(), digests = json::object();
        std::string front_tool;
        for (const char* view : {"front", "side", "back"}) {
            TaskRequirements reqs;
            reqs.needs_identity = std::string_view(view) != "front";
            reqs.style_tags = style;
            const auto tool = choose_tool(ctx, name(), request, reqs);
            if (front_tool.empty()) front_tool = tool.name;
            auto asset = ctx.invoke(tool, id + "_" + view, "image",
                                    {{"prompt", prompt},
                                     {"view", view},
                                     {"character_id", id},
                                     {"identity_token", token},
                                     {"style", style}});
            views[view] = "assets/characters/" + id + "_" + view + ".png";
            digests[view] = asset.content_digest;
            assets.push_back(asset);
        }

        AssetRecord rec;
        rec.table = AssetTable::character;
        rec.key_fields = {{"id", id},
                          {"prompt", prompt},
                          {"demo_voice", ""},
                          {"voice_prompt", description.empty() ? "voice of " + display
                                                               : "voice of " + display + ", " + description},
                          {"3d_view", "assets/characters/" + id + "_views.png"}};
        json descriptor = {{"prompt", prompt},
                           {"identity_tokens", {{id, token}}},
                           {"tool", front_tool},
                           {"views", digests}};
        rec.meta = {{"identity_token", token},
                    {"views", views},
                    {"kind", "image"},
                    {"digest", sha256_hex(digests.dump())},
                    {"descriptor", descriptor}};

        AgentOutput out;
        out.records.push_back(std::move(rec));
        out.response = make_response(request, MessageStatus::success,
                                     {{"character_id", id},
                                      {"identity_token", token},
                                      {"views", views},
                                      {"assets", assets}});
        return out;
    }
};

class SceneDesigner final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kSceneDesigner; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        const auto id = params.at("scene_id").get<std::string>();
        const auto& prompt = request.task->prompt;
        TaskRequirements reqs;
        reqs.needs_spatial = has_spatial_cue(prompt);
        reqs.style_tags = style_tags(ctx.memory, false);
        const auto tool = choose_tool(ctx, name(), request, reqs);
        const json layers = {"background", "midground", "foreground"};
        auto asset = ctx.invoke(tool, id + "_layers", "image",
                                {{"prompt", prompt},
                                 {"scene_id", id},
                                 {"layers", layers},
                                 {"style", reqs.style_tags},
                                 {"requirements", reqs}});

        AssetRecord rec;
        rec.table = AssetTable::scene;
        rec.key_fields = {{"id", id}, {"prompt", prompt}, {"view_3d", "assets/scenes/" + id + "_layers.json"}};
        rec.meta = asset_meta(asset);
        rec.meta["layers"] = layers;

        AgentOutput out;
        out.records.push_back(std::move(rec));
        out.response = make_response(request, MessageStatus::success,
                                     {{"scene_id", id}, {"tool", tool.name}, {"layers", layers}, {"asset", asset}});
        return out;
    }
};

} // namespace

std::shared_ptr<const Agent> make_character_designer() { return std::make_shared<CharacterDesigner>(); }
std::shared_ptr<const Agent> make_scene_designer() { return std::make_shared<SceneDesigner>(); }

} // namespace storyreel::detail
