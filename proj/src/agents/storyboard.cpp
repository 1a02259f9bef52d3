#include "common.hpp"

#include "storyreel/errors.hpp"
#include "storyreel/segmenter.hpp"
#include "storyreel/text.hpp"

#include <algorithm>
#include <set>

namespace storyreel {

namespace {

const std::set<std::string, std::less<>> kSettingWords = {"in", "at", "inside", "outside", "within",
                                                          "on", "under", "near", "across", "along"};
const std::set<std::string, std::less<>> kContinuationWords = {"and", "with"};
const std::set<std::string, std::less<>> kPronouns = {"he", "him", "his", "she", "her", "hers", "they", "them", "their"};

enum class ClauseRole { setting, continuation, beat };

std::vector<std::string> clauses_of(std::string_view description) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        auto c = text::trim(current);
        while (!c.empty() && (c.back() == '.' || c.back() == '!' || c.back() == '?')) c.pop_back();
        c = text::trim(c);
        if (!c.empty()) out.push_back(std::move(c));
        current.clear();
    };
    for (char ch : description) {
        if (ch == ',' || ch == ';') flush();
        else current.push_back(ch);
    }
    flush();
    return out;
}

ClauseRole role_of(const std::string& clause) {
    auto tokens = text::tokenize(clause);
    if (tokens.empty()) return ClauseRole::continuation;
    const auto& first = tokens.front();
    if (kSettingWords.count(first)) return ClauseRole::setting;
    if (kContinuationWords.count(first)) return ClauseRole::continuation;
    if (first.size() >= 5 && first.compare(first.size() - 3, 3, "ing") == 0) return ClauseRole::continuation;
    return ClauseRole::beat;
}

bool mentions_pronoun(std::string_view s) {
    for (const auto& t : text::tokenize(s))
        if (kPronouns.count(t)) return true;
    return false;
}

std::vector<std::string> roster_order(const std::set<std::string>& ids, const std::vector<NamedCharacter>& roster) {
    std::vector<std::string> out;
    for (const auto& c : roster)
        if (ids.count(c.id)) out.push_back(c.id);
    return out;
}

const std::string& name_of(const std::string& id, const std::vector<NamedCharacter>& roster) {
    for (const auto& c : roster)
        if (c.id == id) return c.name;
    return id;
}

TaskRequirements requirements_for(const PanelPlan& p) {
    TaskRequirements r;
    r.needs_identity = !p.characters.empty();
    r.is_establishing = p.characters.empty();
    r.needs_spatial = p.characters.size() >= 2 || has_spatial_cue(p.prompt);
    return r;
}

} // namespace

std::vector<PanelPlan> plan_panels(std::string_view description, const std::vector<NamedCharacter>& characters,
                                   bool split_clauses) {
    std::vector<std::string> texts;
    if (split_clauses) {
        std::string pending_setting;
        for (auto& clause : clauses_of(description)) {
            switch (role_of(clause)) {
            case ClauseRole::setting:
                pending_setting = pending_setting.empty() ? clause : pending_setting + ", " + clause;
                break;
            case ClauseRole::continuation:
                if (!texts.empty() && pending_setting.empty()) {
                    texts.back() += ", " + clause;
                    break;
                }
                [[fallthrough]];
            case ClauseRole::beat:
                texts.push_back(pending_setting.empty() ? clause : pending_setting + ", " + clause);
                pending_setting.clear();
                break;
            }
        }
        if (!pending_setting.empty()) {
            if (texts.empty()) texts.push_back(pending_setting);
            else texts.back() += ", " + pending_setting;
        }
        while (texts.size() > kMaxPanels) {
            texts[kMaxPanels - 1] += ", " + texts[kMaxPanels];
            texts.erase(texts.begin() + kMaxPanels);
        }
    } else {
        auto whole = text::trim(description);
        if (!whole.empty()) texts.push_back(std::move(whole));
    }
    if (texts.empty()) texts.emplace_back(text::trim(description));

    std::vector<PanelPlan> panels;
    bool reaction_added = false;
    for (const auto& t : texts) {
        PanelPlan p;
        p.prompt = t;
        std::set<std::string> explicit_ids;
        for (const auto& c : characters)
            if (!c.name.empty() && text::contains_word(t, c.name)) explicit_ids.insert(c.id);
        std::set<std::string> ids = explicit_ids;
        std::optional<std::string> inherited;
        if (!panels.empty() && !panels.back().characters.empty() && mentions_pronoun(t)) {
            const auto& lead = panels.back().characters.front();
            if (!ids.count(lead)) {
                ids.insert(lead);
                inherited = lead;
            }
        }
        p.characters = roster_order(ids, characters);
        p.requirements = requirements_for(p);
        panels.push_back(p);

        if (!reaction_added && inherited && !explicit_ids.empty() && detect_emotion(t) != "neutral" &&
            texts.size() + 1 <= kMaxPanels) {
            const auto instigator = roster_order(explicit_ids, characters).front();
            PanelPlan r;
            r.prompt = "Close-up of " + name_of(*inherited, characters) + "'s facial expression reacting to " +
                       name_of(instigator, characters);
            r.characters = roster_order({*inherited, instigator}, characters);
            r.reaction = true;
            r.requirements = requirements_for(r);
            panels.push_back(std::move(r));
            reaction_added = true;
        }
    }
    return panels;
}

CameraPlan plan_camera(std::size_t panels, bool scene_opening) {
    static constexpr int kAngles[] = {30, 45, 60};
    CameraPlan plan;
    for (std::size_t i = 0; i < panels; ++i) {
        plan.angles.push_back(kAngles[i % 3]);
        plan.transitions.push_back(i == 0 && scene_opening ? "fade" : "cut");
    }
    return plan;
}

std::vector<LayoutBox> layout_boxes(const std::vector<std::string>& names) {
    if (names.empty()) return {LayoutBox{"environment", {50, 50, 950, 950}, "Full frame"}};
    std::vector<LayoutBox> out;
    const int n = static_cast<int>(names.size());
    const int w = 1000 / n;
    for (int i = 0; i < n; ++i) {
        const char* where = n == 1 ? "Center of the frame" : i == 0 ? "Left side of the frame"
                                                         : i == n - 1 ? "Right side of the frame"
                                                                      : "Center of the frame";
        out.push_back(LayoutBox{names[static_cast<std::size_t>(i)], {i * w + w / 6, 300, (i + 1) * w - w / 6, 900}, where});
    }
    return out;
}

namespace detail {

namespace {

class StoryboardAgent final : public Agent {
public:
    std::string_view name() const noexcept override { return agents::kStoryboard; }

    AgentOutput execute(const Envelope& request, AgentContext& ctx) const override {
        const auto& params = request.params();
        const auto shot_id = params.at("shot_id").get<std::string>();
        const auto scene_id = params.value("scene_id", std::string{});
        const auto style = style_tags(ctx.memory, false);
        const auto names = params.value("character_names", json::object());

        std::vector<NamedCharacter> roster;
        std::map<std::string, std::string> tokens, fronts;
        for (const auto& id : params.value("characters", std::vector<std::string>{})) {
            auto rec = ctx.memory.find(AssetTable::character, id);
            if (!rec) throw DependencyError("missing character asset " + id);
            tokens[id] = rec->meta.value("identity_token", std::string{});
            fronts[id] = rec->meta.value("views", json::object()).value("front", std::string{});
            roster.push_back({id, names.value(id, id)});
        }

        const auto panels = plan_panels(request.task->prompt, roster, !params.value("is_dialogue", false));
        const auto camera = plan_camera(panels.size(), params.value("scene_opening", false));

        AgentOutput out;
        json shots = json::array(), keyframes = json::array(), assets = json::array();
        for (std::size_t i = 0; i < panels.size(); ++i) {
            const auto& panel = panels[i];
            auto reqs = panel.requirements;
            reqs.style_tags = style;
            const auto tool = choose_tool(ctx, name(), request, reqs);

            StoryboardShot shot;
            shot.shot_id = shot_id + "_sb" + two_digits(i + 1);
            shot.tool = tool.name;
            shot.prompt = panel.prompt;
            json identity = json::object();
            std::vector<std::string> panel_names;
            for (const auto& c : panel.characters) {
                shot.reference_images.push_back(fronts[c]);
                identity[c] = tokens[c];
                panel_names.push_back(names.value(c, c));
            }
            if (has_capability(tool, Capability::spatial_control)) {
                shot.layout_bboxes = layout_boxes(panel_names);
                shot.layout = "assets/layouts/" + shot.shot_id + ".json";
                shot.notes = panel.reaction ? "Close framing on expression and posture"
                                            : "Controls where each character stands";
            } else if (has_capability(tool, Capability::identity_consistency)) {
                shot.notes = "Keeps character identity from reference views";
            } else {
                shot.notes = "Establishes the environment";
            }

            json call = {{"prompt", shot.prompt},
                         {"shot_id", shot_id},
                         {"panel_id", shot.shot_id},
                         {"characters", panel.characters},
                         {"identity_tokens", identity},
                         {"reference_images", shot.reference_images},
                         {"layout_bboxes", shot.layout_bboxes},
                         {"angle", camera.angles[i]},
                         {"transition", camera.transitions[i]},
                         {"style", style},
                         {"requirements", reqs}};
            auto asset = ctx.invoke(tool, shot.shot_id, "image", std::move(call));

            AssetRecord rec;
            rec.table = AssetTable::storyboard;
            rec.key_fields = {{"id", shot.shot_id},
                              {"prompt", shot.prompt},
                              {"image_path", "assets/keyframes/" + shot.shot_id + ".png"}};
            rec.meta = asset_meta(asset);
            out.records.push_back(std::move(rec));

            shots.push_back(shot);
            keyframes.push_back(shot.shot_id);
            assets.push_back(asset);
        }

        out.response = make_response(request, MessageStatus::success,
                                     {{"scene_id", scene_id},
                                      {"shot_id", shot_id},
                                      {"storyboard_shots", shots},
                                      {"keyframes", keyframes},
                                      {"camera_plan", camera},
                                      {"assets", assets}});
        return out;
    }
};

} // namespace

std::shared_ptr<const Agent> make_storyboard_agent() { return std::make_shared<StoryboardAgent>(); }

} // namespace detail

} // namespace storyreel
