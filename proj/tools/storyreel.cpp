#include "storyreel/config.hpp"
#include "storyreel/director.hpp"
#include "storyreel/errors.hpp"
#include "storyreel/planner.hpp"
#include "storyreel/segmenter.hpp"
#include "storyreel/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace storyreel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRunFailed = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFound("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

struct Inputs {
    RunConfig config;
    Story story;
};

Inputs load_inputs(const std::string& story_path, const std::string& config_path) {
    Inputs in;
    in.config = load_config(config_path);
    in.story = segment_story(read_file(story_path), in.config.characters);
    return in;
}

int cmd_run(const std::string& story_path, const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, bool interactive, std::string listen) {
    Inputs in;
    try {
        in = load_inputs(story_path, config_path);
    } catch (const Error& e) {
        std::cerr << "storyreel: " << e.what() << "\n";
        return kExitUsage;
    }
    if (seed) in.config.seed = *seed;
    if (interactive) in.config.interactive = true;

    const fs::path out(out_dir);
    fs::create_directories(out);
    fs::remove_all(out / "memory");
    auto memory = std::make_shared<AssetMemory>(out / "memory");
    auto log = std::make_shared<EventLog>();
    std::shared_ptr<Director> director;
    try {
        auto registry = std::make_shared<const ToolRegistry>(registry_for(in.config));
        director = std::make_shared<Director>(in.config, registry, default_agents(), log, memory);
    } catch (const Error& e) {
        std::cerr << "storyreel: " << e.what() << "\n";
        return kExitUsage;
    }

    std::unique_ptr<Service> service;
    if (in.config.interactive) {
        if (listen.empty()) listen = listen_address_from_env();
        auto runs = std::make_shared<RunStore>();
        const auto run_id = in.config.run_id.empty() ? derive_run_id(in.story, in.config.seed) : in.config.run_id;
        runs->add(run_id, RunHandle{log, director});
        service = std::make_unique<Service>(runs);
        try {
            const auto [host, port] = parse_listen_address(listen);
            const int bound = service->start(host, port);
            std::cerr << "storyreel: run " << run_id << " awaiting reviews at http://" << host << ":" << bound
                      << "/runs/" << run_id << "\n";
        } catch (const Error& e) {
            std::cerr << "storyreel: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    int code = kExitOk;
    try {
        const auto manifest = director->run(in.story);
        write_file(out / "manifest.json", json(manifest).dump(2) + "\n");
        std::cout << (out / "manifest.json").string() << "\n";
    } catch (const PlanningError& e) {
        std::cerr << "storyreel: planning failed: " << e.what() << "\n";
        code = kExitRunFailed;
    } catch (const ConfigError& e) {
        std::cerr << "storyreel: " << e.what() << "\n";
        code = kExitUsage;
    } catch (const Error& e) {
        std::cerr << "storyreel: run failed: " << e.what() << "\n";
        code = kExitRunFailed;
    }
    log->write_jsonl(out / "transcript.jsonl");
    if (service) service->stop();
    return code;
}

int cmd_plan(const std::string& story_path, const std::string& config_path) {
    try {
        auto in = load_inputs(story_path, config_path);
        const auto styles = derive_styles(in.story, in.config.style_rules);
        const auto plan = plan_tasks(in.story, styles);
        json batches = json::array();
        for (const auto& b : topological_schedule(plan.graph)) batches.push_back(b);
        std::cout << json{{"story", in.story}, {"styles", styles}, {"tasks", plan.tasks}, {"graph", plan.graph},
                          {"schedule", batches}}
                         .dump(2)
                  << "\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "storyreel: " << e.what() << "\n";
        return kExitUsage;
    }
}

Service* g_service = nullptr;

int cmd_serve(const std::string& dir, std::string listen) {
    auto runs = std::make_shared<RunStore>();
    try {
        const auto n = runs->load_transcripts(dir);
        if (listen.empty()) listen = listen_address_from_env();
        const auto [host, port] = parse_listen_address(listen);
        Service service(runs);
        g_service = &service;
        std::signal(SIGINT, [](int) {
            if (g_service) g_service->stop();
        });
        std::cerr << "storyreel: serving " << n << " run(s) on " << host << ":" << port << "\n";
        const bool ok = service.listen(host, port);
        g_service = nullptr;
        return ok ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "storyreel: " << e.what() << "\n";
        return kExitUsage;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"storyreel: multi-agent story-to-manifest pipeline"};
    app.require_subcommand(1);

    std::string story, config, out = "out", listen, transcripts;
    std::optional<std::uint64_t> seed;
    bool interactive = false;

    auto* run = app.add_subcommand("run", "run the pipeline and write manifest, transcript and asset memory");
    run->add_option("story", story, "story script (plain text)")->required();
    run->add_option("--config", config, "run config (JSON)")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out, "output directory")->capture_default_str();
    run->add_flag("--interactive", interactive, "pause on revise verdicts and checkpoints for review");
    run->add_option("--listen", listen, "host:port for the review service (default $STORYREEL_LISTEN)");

    auto* plan = app.add_subcommand("plan", "print segmentation, task graph and schedule");
    plan->add_option("story", story, "story script (plain text)")->required();
    plan->add_option("--config", config, "run config (JSON)")->required();

    auto* serve = app.add_subcommand("serve", "serve recorded transcripts over HTTP");
    serve->add_option("--transcripts", transcripts, "directory searched for *.jsonl transcripts")->required();
    serve->add_option("--listen", listen, "host:port (default $STORYREEL_LISTEN)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    if (*run) return cmd_run(story, config, seed, out, interactive, listen);
    if (*plan) return cmd_plan(story, config);
    return cmd_serve(transcripts, listen);
}
