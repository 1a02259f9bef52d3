#include "storyreel/director.hpp"

#include "storyreel/digest.hpp"
#include "storyreel/errors.hpp"
#include "storyreel/text.hpp"

#include <algorithm>
#include <future>

namespace storyreel {

std::string_view to_string(EvaluationDecision d) noexcept {
    switch (d) {
    case EvaluationDecision::accept: return "accept";
    case EvaluationDecision::revise: return "revise";
    case EvaluationDecision::degrade_and_continue: return "degrade_and_continue";
    case EvaluationDecision::fail: return "fail";
    }
    return "accept";
}

EvaluationDecision handle_evaluation(const Task& task, const EvaluationReport& report, const RunConfig& config) {
    if (report.task_id != task.id)
        throw ContractViolation("evaluation of " + report.task_id + " routed to " + task.id);
    const bool budget_left = task.revision_count < config.max_revisions;
    switch (report.verdict) {
    case Verdict::accept: return EvaluationDecision::accept;
    case Verdict::revise:
        if (budget_left) return EvaluationDecision::revise;
        return config.continue_on_degraded ? EvaluationDecision::degrade_and_continue : EvaluationDecision::fail;
    case Verdict::escalate: return budget_left ? EvaluationDecision::revise : EvaluationDecision::fail;
    }
    return EvaluationDecision::fail;
}

std::string derive_run_id(const Story& story, std::uint64_t seed) {
    return "run_" + sha256_hex(story.raw_text + "#" + std::to_string(seed)).substr(0, 12);
}

namespace {

const char* role_for(TaskKind k) {
    switch (k) {
    case TaskKind::character_design: return "identity";
    case TaskKind::scene_design: return "background";
    case TaskKind::storyboard: return "keyframes";
    case TaskKind::audio: return "audio";
    case TaskKind::animation: return "video";
    case TaskKind::edit: return "final";
    case TaskKind::evaluate: return "report";
    }
    return "input";
}

std::string output_marker(const std::string& task_id) { return "output:" + task_id; }
bool is_output_marker(const std::string& key) { return key.rfind("output:", 0) == 0; }

struct CloseOnExit {
    EventLog& log;
    ~CloseOnExit() { log.close(); }
};

} // namespace

Director::Director(RunConfig config, std::shared_ptr<const ToolRegistry> registry, AgentSet agents,
                   std::shared_ptr<EventLog> log, std::shared_ptr<AssetMemory> memory)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      agents_(std::move(agents)),
      log_(std::move(log)),
      memory_(std::move(memory)) {
    if (!registry_) throw ConfigError("director needs a tool registry");
    if (!log_ || !memory_) throw ConfigError("director needs an event log and asset memory");
}

std::string Director::run_id() const {
    std::lock_guard lock(mutex_);
    return run_id_;
}

std::map<std::string, Task> Director::tasks() const {
    std::lock_guard lock(mutex_);
    return tasks_;
}

AssetFlow Director::consumed() const {
    std::lock_guard lock(mutex_);
    return consumed_;
}

AssetFlow Director::produced() const {
    std::lock_guard lock(mutex_);
    return produced_;
}

void Director::set_status(Task& task, TaskStatus to, const std::string& cause, const json& extra) {
    if (!is_valid_transition(task.status, to))
        throw ContractViolation("illegal transition " + std::string(to_string(task.status)) + " -> " +
                                std::string(to_string(to)) + " for " + task.id);
    json payload = {{"task_id", task.id},
                    {"from", task.status},
                    {"to", to},
                    {"revision_count", task.revision_count},
                    {"cause", cause}};
    for (const auto& [k, v] : extra.items()) payload[k] = v;
    task.status = to;
    log_->append("task_status", std::move(payload));
}

void Director::fail_run(const std::string& task_id, const std::string& reason) {
    log_->append("run_failed", {{"task_id", task_id}, {"reason", reason}});
    throw RunFailure(task_id, reason);
}

std::vector<std::string> Director::predecessors_of(const std::string& id) const {
    auto it = preds_.find(id);
    if (it == preds_.end()) return {};
    auto out = it->second;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Director::ready_tasks() const {
    std::vector<std::string> ready;
    for (const auto& [id, t] : tasks_) {
        if (t.status != TaskStatus::pending) continue;
        bool ok = true;
        for (const auto& p : predecessors_of(id))
            if (tasks_.at(p).status != TaskStatus::succeeded) {
                ok = false;
                break;
            }
        if (ok) ready.push_back(id);
    }
    return ready;
}

Envelope Director::build_request(const Task& t) {
    const int attempt = attempts_[t.id];
    json params = t.payload;
    params.erase("prompt");
    params.erase("requirement");
    AssetRefs assets;
    if (t.kind == TaskKind::evaluate) {
        const auto target = t.payload.at("target").get<std::string>();
        params["target_outputs"] = outputs_.count(target) ? outputs_.at(target) : json::object();
        auto& subject = assets["subject"];
        for (const auto& k : produced_[target])
            if (!is_output_marker(k)) subject.push_back(k);
    } else {
        assets["style"] = {asset_key(AssetTable::style, "style_main")};
        for (const auto& p : predecessors_of(t.id)) {
            auto& refs = assets[role_for(tasks_.at(p).kind)];
            for (const auto& k : produced_[p])
                if (!is_output_marker(k)) refs.push_back(k);
        }
        if (t.kind == TaskKind::edit) params["run_id"] = run_id_;
    }
    if (auto it = overrides_.find(t.id); it != overrides_.end()) {
        params["tool_override"] = it->second;
        overrides_.erase(it);
    }
    if (auto it = notes_.find(t.id); it != notes_.end()) {
        params["revision_note"] = it->second;
        notes_.erase(it);
    }
    std::optional<std::string> requirement;
    if (auto it = t.payload.find("requirement"); it != t.payload.end() && it->is_string()) requirement = *it;
    return make_request(t.id + "_v" + std::to_string(attempt), std::string(to_string(t.kind)),
                        t.payload.value("prompt", std::string{}), requirement, std::move(params), std::move(assets),
                        attempt, t.agent);
}

Director::Result Director::execute(Task task, Envelope request) const {
    Result r{task.id, std::move(request), std::nullopt, {}, {}};
    const auto& agent = agents_.at(task.agent);
    TrackedReader reader(*memory_);
    AgentContext ctx{reader, *registry_};
    ctx.seed = config_.seed;
    ctx.task_id = task.id;
    ctx.attempt = r.request.meta.version;
    ctx.faults = config_.faults;
    ctx.thresholds = config_.thresholds;
    ctx.seconds_per_panel = config_.seconds_per_panel;
    try {
        r.output = agent->execute(r.request, ctx);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.reads = reader.reads();
    return r;
}

void Director::apply_result(const Result& r, std::vector<std::pair<std::string, EvaluationReport>>& evaluations) {
    Task& t = tasks_.at(r.task_id);
    if (!r.output) {
        auto response = make_response(r.request, MessageStatus::error, {{"error", r.error}});
        log_->append("message", {{"direction", "response"}, {"task_id", t.id}, {"envelope", to_json_value(response)}});
        set_status(t, TaskStatus::failed, "error", {{"error", r.error}});
        fail_run(t.id, r.error);
    }
    const auto& response = r.output->response;
    try {
        validate(response);
        provenance_.track(response);
    } catch (const Error& e) {
        set_status(t, TaskStatus::failed, "protocol", {{"error", e.what()}});
        fail_run(t.id, e.what());
    }
    log_->append("message", {{"direction", "response"}, {"task_id", t.id}, {"envelope", to_json_value(response)}});

    std::set<std::string> produced;
    for (const auto& rec : r.output->records) {
        const auto key = rec.key();
        produced.insert(key);
        auto existing = memory_->find(rec.table, rec.id());
        if (existing && existing->content() == rec.content()) continue;
        try {
            memory_->put(rec, t.agent);
        } catch (const Error& e) {
            set_status(t, TaskStatus::failed, "asset_write", {{"error", e.what()}});
            fail_run(t.id, e.what());
        }
        log_->append("asset_stored", {{"task_id", t.id}, {"record", memory_->get(rec.table, rec.id())}});
    }
    // declared inputs count as consumed even when the agent never looked them up
    auto consumed = r.reads;
    if (r.request.assets)
        for (const auto& [role, refs] : *r.request.assets) consumed.insert(refs.begin(), refs.end());
    // an evaluation reads its target's response even when the target stores no asset
    if (t.kind == TaskKind::evaluate) consumed.insert(output_marker(t.payload.at("target").get<std::string>()));
    produced.insert(output_marker(t.id));
    consumed_[t.id] = std::move(consumed);
    produced_[t.id] = std::move(produced);
    outputs_[t.id] = response.outputs.value_or(json::object());

    if (t.kind == TaskKind::evaluate) {
        set_status(t, TaskStatus::succeeded, "completed");
        evaluations.emplace_back(t.id, outputs_[t.id].at("report").get<EvaluationReport>());
    } else if (config_.interactive && config_.review_checkpoints.count(t.kind)) {
        set_status(t, TaskStatus::awaiting_review, "checkpoint");
        request_review(t, "checkpoint", std::nullopt);
    } else {
        set_status(t, TaskStatus::succeeded, "completed");
    }
}

void Director::request_review(const Task& t, const std::string& reason, const std::optional<EvaluationReport>& report) {
    json tools = json::array();
    for (const auto& tool : registry_->tools(t.agent)) tools.push_back(tool.name);
    json refs = json::array();
    for (const auto& k : produced_[t.id])
        if (!is_output_marker(k)) refs.push_back(k);
    log_->append("review_requested", {{"task_id", t.id},
                                      {"reason", reason},
                                      {"asset_refs", refs},
                                      {"report", report ? json(*report) : json(nullptr)},
                                      {"tools", tools}});
}

void Director::revise(const std::string& task_id, const std::string& cause, std::optional<std::string> tool,
                      std::optional<std::string> note) {
    Task& t = tasks_.at(task_id);
    ++t.revision_count;
    set_status(t, TaskStatus::needs_revision, cause);
    set_status(t, TaskStatus::pending, cause);
    if (tool) overrides_[task_id] = *tool;
    if (note) notes_[task_id] = *note;

    for (const auto& id : localized_revision(graph_, task_id, consumed_, produced_)) {
        if (id == task_id) continue;
        Task& c = tasks_.at(id);
        if (c.status != TaskStatus::succeeded && c.status != TaskStatus::awaiting_review) continue;
        const auto why = "upstream_revised:" + task_id;
        if (c.status == TaskStatus::awaiting_review) {
            log_->append("review_resolved", {{"task_id", id}, {"decision", "superseded"}});
            queued_.erase(id);
        }
        set_status(c, TaskStatus::needs_revision, why);
        set_status(c, TaskStatus::pending, why);
    }
}

void Director::process_evaluation(const std::string& eval_id, const EvaluationReport& report) {
    const Task& ev = tasks_.at(eval_id);
    const auto target = ev.payload.at("target").get<std::string>();
    Task& t = tasks_.at(target);
    if (ev.status != TaskStatus::succeeded || t.status != TaskStatus::succeeded) {
        log_->append("evaluation", {{"task_id", eval_id}, {"target", target}, {"report", report}, {"decision", "stale"}});
        return;
    }
    const auto decision = handle_evaluation(t, report, config_);
    log_->append("evaluation",
                 {{"task_id", eval_id}, {"target", target}, {"report", report}, {"decision", to_string(decision)}});
    switch (decision) {
    case EvaluationDecision::accept: degraded_.erase(target); break;
    case EvaluationDecision::revise:
        if (config_.interactive) {
            set_status(t, TaskStatus::awaiting_review, "evaluation");
            request_review(t, "evaluation", report);
        } else {
            revise(target, "evaluation", report.recommended_tool, std::nullopt);
        }
        break;
    case EvaluationDecision::degrade_and_continue:
        degraded_.insert(target);
        log_->append("task_degraded", {{"task_id", target}, {"revision_count", t.revision_count}});
        break;
    case EvaluationDecision::fail: fail_run(target, "revision budget exhausted");
    }
}

void Director::apply_decisions() {
    auto queued = std::move(queued_);
    queued_.clear();
    for (const auto& [id, d] : queued) {
        Task& t = tasks_.at(id);
        if (t.status != TaskStatus::awaiting_review) {
            log_->append("review_resolved", {{"task_id", id}, {"decision", "superseded"}});
            continue;
        }
        switch (d.kind) {
        case ReviewDecision::Kind::approve:
            log_->append("review_resolved", {{"task_id", id}, {"decision", "approve"}});
            set_status(t, TaskStatus::succeeded, "human_approve");
            break;
        case ReviewDecision::Kind::reject:
            log_->append("review_resolved", {{"task_id", id}, {"decision", "reject"}, {"note", d.note}});
            revise(id, "human_reject", std::nullopt, d.note);
            break;
        case ReviewDecision::Kind::override_tool:
            log_->append("review_resolved", {{"task_id", id}, {"decision", "override_tool"}, {"tool", d.tool}});
            revise(id, "human_override", d.tool, std::nullopt);
            break;
        }
    }
}

DecisionResult Director::submit_decision(const std::string& task_id, const ReviewDecision& d) {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) return {DecisionResult::Code::not_found, "unknown task " + task_id};
    const Task& t = it->second;
    if (t.status != TaskStatus::awaiting_review || queued_.count(task_id))
        return {DecisionResult::Code::conflict, task_id + " is not awaiting review"};
    if (d.kind != ReviewDecision::Kind::approve && t.revision_count >= config_.max_revisions)
        return {DecisionResult::Code::conflict, task_id + " has no revisions left"};
    if (d.kind == ReviewDecision::Kind::override_tool && !registry_->find(t.agent, d.tool))
        return {DecisionResult::Code::invalid, t.agent + " has no tool named " + d.tool};
    queued_[task_id] = d;
    decided_.notify_all();
    return {DecisionResult::Code::applied, "queued"};
}

FinalManifest Director::run(const Story& story) {
    std::unique_lock lock(mutex_);
    if (running_) throw ContractViolation("director is already running");
    running_ = true;
    CloseOnExit closer{*log_};

    run_id_ = config_.run_id.empty() ? derive_run_id(story, config_.seed) : config_.run_id;
    log_->append("run_started", {{"run_id", run_id_},
                                 {"story_id", story.id},
                                 {"seed", config_.seed},
                                 {"interactive", config_.interactive},
                                 {"config", config_to_json(config_)}});

    StyleVector styles;
    try {
        if (auto problems = validate_story(story); !problems.empty())
            throw PlanningError("invalid story: " + problems.front());
        styles = derive_styles(story, config_.style_rules);
        auto plan = plan_tasks(story, styles);
        for (const auto& t : plan.tasks) {
            if (!agents_.count(t.agent)) throw ConfigError("no agent registered as " + t.agent);
            if (t.kind != TaskKind::evaluate && registry_->tools(t.agent).empty())
                throw ConfigError("agent " + t.agent + " has no registered tools");
        }
        topological_schedule(plan.graph);
        graph_ = plan.graph;
        preds_ = graph_.predecessors();
        for (auto& t : plan.tasks) tasks_.emplace(t.id, t);
        log_->append("story", {{"story", story}});
        log_->append("styles_derived", {{"styles", styles}});
        log_->append("graph_planned", {{"tasks", plan.tasks}, {"graph", graph_}});
    } catch (const Error& e) {
        log_->append("run_failed", {{"task_id", ""}, {"reason", e.what()}});
        throw;
    }

    const std::string director(agents::kDirector);
    auto store = [&](AssetRecord rec) {
        memory_->put(rec, director);
        log_->append("asset_stored", {{"task_id", ""}, {"record", memory_->get(rec.table, rec.id())}});
    };
    AssetRecord style;
    style.table = AssetTable::style;
    style.key_fields = {{"id", "style_main"},
                        {"visual_style", text::join(styles.visual_style, ", ")},
                        {"acoustic_style", text::join(styles.acoustic_style, ", ")}};
    store(style);
    for (const auto& scene : story.scenes)
        for (const auto& shot : scene.shots) {
            AssetRecord rec;
            rec.table = AssetTable::shot;
            rec.key_fields = {{"id", shot.id}, {"description", shot.description}};
            store(rec);
        }

    for (;;) {
        apply_decisions();
        auto ready = ready_tasks();
        if (ready.empty()) {
            const bool done = std::all_of(tasks_.begin(), tasks_.end(),
                                          [](const auto& kv) { return kv.second.status == TaskStatus::succeeded; });
            if (done) break;
            const bool waiting = std::any_of(tasks_.begin(), tasks_.end(), [](const auto& kv) {
                return kv.second.status == TaskStatus::awaiting_review;
            });
            if (!waiting) fail_run("", "no runnable tasks remain");
            decided_.wait(lock, [&] { return !queued_.empty(); });
            continue;
        }

        std::vector<std::pair<Task, Envelope>> batch;
        for (const auto& id : ready) {
            Task& t = tasks_.at(id);
            ++attempts_[id];
            auto request = build_request(t);
            provenance_.track(request);
            set_status(t, TaskStatus::running, attempts_[id] == 1 ? "scheduled" : "rerun",
                       {{"attempt", attempts_[id]}});
            log_->append("message", {{"direction", "request"}, {"task_id", id}, {"envelope", to_json_value(request)}});
            batch.emplace_back(t, std::move(request));
        }

        lock.unlock();
        std::vector<Result> results;
        results.reserve(batch.size());
        const std::size_t width = std::max<std::size_t>(1, config_.workers);
        for (std::size_t start = 0; start < batch.size(); start += width) {
            const auto end = std::min(batch.size(), start + width);
            if (end - start == 1) {
                results.push_back(execute(batch[start].first, batch[start].second));
                continue;
            }
            std::vector<std::future<Result>> running;
            for (auto i = start; i < end; ++i)
                running.push_back(std::async(std::launch::async, [this, &batch, i] {
                    return execute(batch[i].first, batch[i].second);
                }));
            for (auto& f : running) results.push_back(f.get());
        }
        lock.lock();

        std::vector<std::pair<std::string, EvaluationReport>> evaluations;
        for (const auto& r : results) apply_result(r, evaluations);
        for (const auto& [id, report] : evaluations) process_evaluation(id, report);
    }

    auto manifest = outputs_.at(task_ids::edit()).at("manifest").get<FinalManifest>();
    manifest.run_id = run_id_;
    manifest.degraded_tasks.assign(degraded_.begin(), degraded_.end());
    if (auto problems = validate_manifest(manifest, story); !problems.empty())
        fail_run(task_ids::edit(), "manifest invalid: " + problems.front());
    log_->append("run_completed", {{"manifest", manifest}});
    return manifest;
}

FinalManifest run_pipeline(const Story& story, const RunConfig& config, std::shared_ptr<EventLog> log) {
    auto registry = std::make_shared<const ToolRegistry>(registry_for(config));
    Director director(config, std::move(registry), default_agents(), std::move(log));
    return director.run(story);
}

} // namespace storyreel
