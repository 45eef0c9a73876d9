#include "gridcomm/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridcomm/config.hpp"
#include "gridcomm/episode.hpp"
#include "gridcomm/error.hpp"
#include "gridcomm/metrics.hpp"
#include "gridcomm/render.hpp"
#include "gridcomm/serialize.hpp"
#include "gridcomm/server.hpp"
#include "gridcomm/session.hpp"
#include "gridcomm/trace.hpp"

namespace gridcomm {

using nlohmann::json;

namespace {

constexpr std::uint64_t kListenerStream = 0x6c697374656eULL;

// Config file < $GRIDCOMM_SEED < --seed.
SessionConfig resolve_config(const std::string& path, std::optional<std::uint64_t> seed) {
    SessionConfig cfg = path.empty() ? SessionConfig{} : load_config(path);
    apply_env_overrides(cfg);
    if (seed) cfg.environment.seed = *seed;
    return cfg;
}

json expect_ok(const json& response) {
    if (response.contains("error")) {
        throw Error(response["error"].get<std::string>() + ": " + response["detail"].get<std::string>());
    }
    return response;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

int cmd_serve(const std::string& config_path, std::optional<int> port, const std::string& trace,
              std::ostream& err) {
    const SessionConfig cfg = resolve_config(config_path, std::nullopt);
    auto sink = std::make_shared<TraceSink>(trace);
    if (!port) {
        serve_stream(cfg, std::cin, std::cout, sink);
        return 0;
    }
    TcpServer server(cfg, *port, sink);
    err << "listening on 127.0.0.1:" << server.port() << std::endl;
    server.run();
    return 0;
}

int cmd_gen_episodes(const std::string& config_path, std::optional<std::uint64_t> seed, int count,
                     const std::string& out_path, std::ostream& out) {
    if (count < 0) throw ConfigError("--count must be non-negative");
    const SessionConfig cfg = resolve_config(config_path, seed);
    std::ofstream file = open_out(out_path);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = mix_seed(cfg.environment.seed + static_cast<std::uint64_t>(i));
        Rng rng(s);
        const Episode ep = sample_episode(cfg.environment, rng, cfg.lexicon);
        const auto plan = oracle_solve(ep.state, ep.task, cfg.environment.episode_len);
        json line{{"index", i},
                  {"seed", s},
                  {"episode", episode_to_json(ep)},
                  {"oracle_solution", actions_to_json(plan)}};
        file << line.dump() << '\n';
    }
    if (!file) throw Error("failed writing '" + out_path + "'");
    out << "wrote " << count << " episodes to " << out_path << '\n';
    return 0;
}

int cmd_rollout(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& speaker, const std::string& listener, int episodes,
                const std::string& out_path, std::ostream& out) {
    if (episodes < 1) throw ConfigError("--episodes must be positive");
    const SessionConfig cfg = resolve_config(config_path, seed);
    auto sink = std::make_shared<TraceSink>(out_path);
    Session session(cfg, sink);
    expect_ok(session.handle({{"cmd", "baseline"}, {"kind", speaker + "_speaker"}}));
    const bool oracle = listener == "oracle";
    if (oracle) expect_ok(session.handle({{"cmd", "baseline"}, {"kind", "oracle_listener"}}));

    Rng listener_rng(mix_seed(cfg.environment.seed ^ kListenerStream));
    double total = 0.0;
    for (int i = 0; i < episodes; ++i) {
        expect_ok(session.handle({{"cmd", "reset"}}));
        std::vector<Action> plan;
        if (oracle) {
            const Episode* ep = session.episode();
            plan = oracle_solve(ep->state, ep->task, cfg.environment.episode_len);
        }
        bool done = false;
        for (std::size_t t = 0; !done; ++t) {
            Action a;
            if (oracle) {
                if (t >= plan.size()) throw Error("oracle plan ended before the episode did");
                a = plan[t];
            } else {
                a = action_from_index(
                    static_cast<int>(uniform_index(listener_rng, static_cast<std::uint64_t>(cfg.num_actions))));
            }
            const json r = expect_ok(
                session.handle({{"cmd", "step"}, {"action", std::string(to_string(a))}}));
            total += r["reward"].get<double>();
            done = r["done"].get<bool>();
        }
    }
    expect_ok(session.handle({{"cmd", "close"}}));
    char buf[64];
    std::snprintf(buf, sizeof buf, "mean_reward %.3f", total / episodes);
    out << buf << '\n';
    return 0;
}

void print_metric(std::ostream& out, const char* name, const MetricValue& m) {
    out << name << ' ';
    if (m.value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12f", *m.value);
        out << buf << '\n';
    } else {
        out << "undefined (" << m.error << ")\n";
    }
}

int cmd_eval_metrics(const std::string& trace_path, const std::string& view_name, double alpha,
                     std::ostream& out) {
    SymbolView view = SymbolView::kConcatenated;
    if (view_name == "per_attribute") view = SymbolView::kPerAttribute;
    const auto records = read_trace(trace_path);
    const MetricsReport r = evaluate_trace(records, view, alpha);
    out << "records " << r.records << '\n';
    print_metric(out, "ci", r.ci);
    print_metric(out, "cic", r.cic);
    print_metric(out, "topsim", r.topsim);
    return 0;
}

int cmd_render(const std::string& episode_path, int index, const std::string& out_path, int cell_px,
               double illumination, std::ostream& out) {
    std::ifstream in(episode_path);
    if (!in) throw Error("cannot read episode file '" + episode_path + "'");
    std::string line;
    for (int i = 0; i <= index; ++i) {
        if (!std::getline(in, line)) {
            throw Error("episode file has no record " + std::to_string(index));
        }
    }
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::parse_error&) {
        throw ParseError("line " + std::to_string(index + 1) + ": malformed episode record", line);
    }
    const Episode ep = episode_from_json(doc.contains("episode") ? doc["episode"] : doc);
    const Frame frame = apply_lights_out(render_grid(ep.state, cell_px), illumination);
    write_ppm(frame, out_path);
    out << "wrote " << frame.width << 'x' << frame.height << " image to " << out_path << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"grid-world speaker/listener environment", "gridcomm"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed_value = 0;
    int port = 0;
    std::string trace_path;

    auto* serve = app.add_subcommand("serve", "Run the line protocol on stdio, or TCP with --port");
    serve->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    auto* port_opt = serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 picks one)");
    serve->add_option("--trace", trace_path, "Trace file written on close");

    auto* gen = app.add_subcommand("gen-episodes", "Write sampled episodes with oracle solutions");
    gen->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    auto* gen_seed = gen->add_option("--seed", seed_value, "Base seed");
    int count = 0;
    gen->add_option("--count", count, "Number of episodes")->required();
    gen->add_option("--out", out_path, "Output JSONL file")->required();

    auto* rollout = app.add_subcommand("rollout", "Run scripted baselines through a session");
    rollout->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
    auto* roll_seed = rollout->add_option("--seed", seed_value, "Base seed");
    std::string speaker;
    std::string listener;
    int episodes = 0;
    rollout->add_option("--speaker", speaker, "Scripted speaker")
        ->required()
        ->check(CLI::IsMember({"random", "fixed", "perfect"}));
    rollout->add_option("--listener", listener, "Scripted listener")
        ->required()
        ->check(CLI::IsMember({"random", "oracle"}));
    rollout->add_option("--episodes", episodes, "Episode count")->required();
    rollout->add_option("--out", out_path, "Trace file")->required();

    auto* eval = app.add_subcommand("eval-metrics", "CI, CIC and topsim of a trace file");
    eval->add_option("--trace", trace_path, "Trace file")->required();
    std::string view = "concatenated";
    eval->add_option("--view", view, "Symbol view")
        ->check(CLI::IsMember({"concatenated", "per_attribute"}));
    double alpha = 0.0;
    eval->add_option("--alpha", alpha, "Additive smoothing for CI")->check(CLI::NonNegativeNumber);

    auto* render = app.add_subcommand("render", "Rasterise one episode to a PPM image");
    std::string episode_path;
    int index = 0;
    int cell_px = 30;
    double illumination = 1.0;
    render->add_option("--episode", episode_path, "Episode JSONL file")->required();
    render->add_option("--index", index, "Record index")->check(CLI::NonNegativeNumber);
    render->add_option("--out", out_path, "Output PPM")->required();
    render->add_option("--cell-px", cell_px, "Pixels per cell")->check(CLI::Range(kMinCellPx, 1024));
    render->add_option("--illumination", illumination, "Lights-out factor")->check(CLI::Range(0.0, 1.0));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "gridcomm: " << e.what() << '\n';
        return 2;
    }

    const auto flag_seed = [&](CLI::Option* opt) {
        return opt->count() > 0 ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
    };
    try {
        if (serve->parsed()) {
            return cmd_serve(config_path, port_opt->count() > 0 ? std::optional<int>(port) : std::nullopt,
                             trace_path, err);
        }
        if (gen->parsed()) return cmd_gen_episodes(config_path, flag_seed(gen_seed), count, out_path, out);
        if (rollout->parsed()) {
            return cmd_rollout(config_path, flag_seed(roll_seed), speaker, listener, episodes, out_path, out);
        }
        if (eval->parsed()) return cmd_eval_metrics(trace_path, view, alpha, out);
        if (render->parsed()) return cmd_render(episode_path, index, out_path, cell_px, illumination, out);
    } catch (const std::exception& e) {
        err << "gridcomm: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace gridcomm
