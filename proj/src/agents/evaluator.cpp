#include "common.hpp"

#include "storyreel/text.hpp"

#include <set>

namespace storyreel {

double text_similarity(std::string_view descriptor_prompt, std::string_view spec_prompt) {
    const auto spec_tokens = text::tokenize(spec_prompt);
    const std::set<std::string> spec(spec_tokens.begin(), spec_tokens.end());
    if (spec.empty()) return 1.0;
    const auto desc_tokens = text::tokenize(descriptor_prompt);
    const std::set<std::string> desc(desc_tokens.begin(), desc_tokens.end());
    std::size_t common = 0;
    for (const auto& t : spec) common += desc.count(t);
    return static_cast<double>(common) / static_cast<double>(spec.size());
}

namespace {

std::set<std::string> descriptor_shots(const json& d) {
    std::set<std::string> out;
    if (auto it = d.find("shot_id"); it != d.end() && it->is_string()) out.insert(it->get<std::string>());
    if (auto it = d.find("shot_ids"); it != d.end() && it->is_array())
        for (const auto& s : *it)
            if (s.is_string()) out.insert(s.get<std::string>());
    return out;
}

} // namespace

EvaluationReport evaluate(const MockAsset& asset, const json& spec, const EvaluationContext& context) {
    const auto& d = asset.descriptor;
    EvaluationReport r;
    r.task_id = spec.value("target", std::string{});
    r.text_similarity = text_similarity(d.value("prompt", std::string{}), spec.value("prompt", std::string{}));
    if (r.text_similarity < context.similarity_threshold) r.notes.push_back("prompt drift");

    const auto tokens = d.value("identity_tokens", json::object());
    for (const auto& [character, token] : tokens.items()) {
        auto known = context.known_identities.find(character);
        if (known == context.known_identities.end() || !token.is_string() || known->second != token.get<std::string>()) {
            r.identity_ok = false;
            r.notes.push_back("identity drift: " + character);
        }
    }

    if (auto it = spec.find("mix_id"); it != spec.end() && it->is_string()) {
        const auto audio = d.find("audio_id");
        r.av_sync_ok = audio != d.end() && audio->is_string() && *audio == *it;
        if (!r.av_sync_ok) r.notes.push_back("audio not bound to " + it->get<std::string>());
    }

    std::vector<std::string> wanted;
    if (auto it = spec.find("shot_id"); it != spec.end() && it->is_string()) wanted.push_back(*it);
    else if (auto shots = spec.find("shots"); shots != spec.end() && shots->is_array())
        for (const auto& s : *shots) wanted.push_back(s.get<std::string>());
    const auto present = descriptor_shots(d);
    for (const auto& s : wanted)
        if (!present.count(s)) {
            r.narrative_ok = false;
            r.notes.push_back("shot missing: " + s);
        }

    if (context.registry && !context.producing_agent.empty()) {
        const bool spec_layout = spec.value("needs_layout", false);
        std::vector<const json*> parts;
        if (auto it = d.find("panels"); it != d.end() && it->is_array())
            for (const auto& p : *it) parts.push_back(&p);
        else
            parts.push_back(&d);
        bool mismatch = false;
        for (const auto* p : parts) {
            bool needs = spec_layout;
            if (auto req = p->find("requirements"); req != p->end() && req->is_object())
                needs = req->value("needs_spatial", false);
            const auto tool_name = p->value("tool", std::string{});
            const auto* tool = context.registry->find(context.producing_agent, tool_name);
            if (needs && tool && !tool->capabilities.count(Capability::spatial_control)) mismatch = true;
        }
        if (mismatch) {
            TaskRequirements want;
            want.needs_spatial = true;
            want.needs_identity = !spec.value("characters", json::array()).empty();
            for (const auto& c : explain_selection(*context.registry, context.producing_agent, want))
                if (c.tool.capabilities.count(Capability::spatial_control)) {
                    r.recommended_tool = c.tool.name;
                    r.notes.push_back("layout needed; switch to " + c.tool.name);
                    break;
                }
        }
    }

    const bool pass = r.text_similarity >= context.similarity_threshold && r.identity_ok && r.av_sync_ok &&
                      r.narrative_ok && !r.recommended_tool;
    r.verdict = pass ? Verdict::accept : Verdict::revise;
    return r;
}

namespace detail {

namespace {

class QualityEvaluator final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kEvaluator; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        json spec = request.params();
        spec["prompt"] = request.task->prompt;
        const auto target = spec.at("target").get<std::string>();

        json composite = {{"identity_tokens", json::object()},
                          {"shot_ids", json::array()},
                          {"panels", json::array()},
                          {"audio_id", nullptr}};
        std::vector<std::string> prompts;
        std::set<std::string> shots;
        auto absorb = [&](const json& d) {
            if (auto p = d.find("prompt"); p != d.end() && p->is_string()) prompts.push_back(*p);
            const auto tokens = d.value("identity_tokens", json::object());
            for (const auto& [c, t] : tokens.items()) composite["identity_tokens"][c] = t;
            for (const auto& s : descriptor_shots(d)) shots.insert(s);
            if (auto a = d.find("audio_id"); a != d.end() && a->is_string()) composite["audio_id"] = *a;
            json panel = {{"tool", d.value("tool", std::string{})}};
            if (d.contains("requirements")) panel["requirements"] = d["requirements"];
            composite["panels"].push_back(panel);
        };

        const auto& subject = request.asset_refs("subject");
        for (const auto& key : subject)
            if (auto rec = ctx.memory.find(key)) absorb(rec->meta.value("descriptor", json::object()));
        if (subject.empty())
            if (auto outputs = spec.find("target_outputs"); outputs != spec.end() && outputs->contains("descriptor"))
                absorb((*outputs)["descriptor"]);
        composite["prompt"] = text::join(prompts, " ");
        for (const auto& s : shots) composite["shot_ids"].push_back(s);

        EvaluationContext ectx;
        ectx.similarity_threshold = ctx.thresholds.text_similarity;
        ectx.registry = &ctx.registry;
        ectx.producing_agent = spec.value("target_agent", std::string{});
        for (const auto& [c, t] : composite["identity_tokens"].items())
            if (auto rec = ctx.memory.find(AssetTable::character, c))
                ectx.known_identities[c] = rec->meta.value("identity_token", std::string{});

        MockAsset asset{"composite_" + target, "image", composite, descriptor_digest(composite)};
        auto report = evaluate(asset, spec, ectx);
        report.task_id = target;

        AgentOutput out;
        out.response = make_response(request, MessageStatus::success, {{"report", report}});
        return out;
    }
};

} // namespace

std::shared_ptr<const Agent> make_quality_evaluator() { return std::make_shared<QualityEvaluator>(); }

} // namespace detail

} // namespace storyreel
