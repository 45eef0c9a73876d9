#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gridcomm/cli.hpp"
#include "gridcomm/config.hpp"
#include "gridcomm/error.hpp"
#include "gridcomm/serialize.hpp"
#include "gridcomm/server.hpp"
#include "gridcomm/session.hpp"
#include "gridcomm/trace.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gridcomm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("gridcomm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o, e;
    const int rc = run_cli(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return rc;
}

TraceRecord random_record(Rng& rng) {
    const auto all = all_concepts();
    TraceRecord r;
    r.episode_id = uniform_int(rng, 0, 50);
    r.seed = rng();
    r.config_digest = "00ff00ff00ff00ff";
    r.concept_vector = all[uniform_index(rng, all.size())];
    const int rounds = uniform_int(rng, 0, 2);
    for (int i = 0; i < rounds; ++i) {
        std::vector<std::int64_t> syms(static_cast<std::size_t>(uniform_int(rng, 1, 5)));
        for (auto& s : syms) s = uniform_int(rng, 0, 15);
        r.rounds.push_back(syms);
        if (bernoulli(rng, 0.3)) {
            r.raw_rounds.push_back({{{uniform_unit(rng), uniform_real(rng, -1, 1)}}});
        }
    }
    const int steps = uniform_int(rng, 0, 10);
    for (int i = 0; i < steps; ++i) r.actions.push_back(testing_support::random_action(rng));
    r.reward = bernoulli(rng, 0.5) ? 1.0 : uniform_real(rng, -1, 1);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, DefaultsRoundTrip) {
    const SessionConfig c = reference_push_pull_config();
    const SessionConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(config_digest(back), config_digest(c));
    EXPECT_EQ(config_digest(c).size(), 16u);
    EXPECT_NE(config_digest(c), config_digest(reference_walk_config()));
}

TEST(Config, TableOneNames) {
    const json doc = json::parse(R"({
      "environment": {"grid_size": 5, "distractors": 3, "type_grammar": "simple_trans",
                      "verbs": ["push", "pickup"], "enable_maze": true, "maze_density": 0.3,
                      "grid_input_type": "image", "num_episodes": 200000},
      "channel": {"comm_type": "categorical", "num_msgs": 3, "msg_len": 4, "temp": 1.5},
      "render": {"cell_px": 12}
    })");
    const SessionConfig c = config_from_json(doc);
    EXPECT_EQ(c.environment.grid_size, 5);
    EXPECT_EQ(c.environment.num_distractors, 3);
    EXPECT_EQ(c.environment.grammar_kind, GrammarKind::kSimpleTrans);
    EXPECT_EQ(c.environment.verb_set, (std::vector<Verb>{Verb::kPush, Verb::kPickup}));
    EXPECT_TRUE(c.environment.enable_maze);
    EXPECT_EQ(c.channel.mode, ChannelMode::kOneHot);
    EXPECT_EQ(c.channel.num_msgs, 3);
    EXPECT_EQ(c.channel.temperature, 1.5);
    EXPECT_EQ(c.render.cell_px, 12);
    EXPECT_EQ(c.grid_input_type, "image");
    EXPECT_EQ(c.num_episodes, 200000);
}

TEST(Config, ShippedReferenceFiles) {
    const std::string dir = GRIDCOMM_SOURCE_DIR "/configs/";
    EXPECT_EQ(config_to_json(load_config(dir + "walk.json")), config_to_json(reference_walk_config()));
    EXPECT_EQ(config_to_json(load_config(dir + "push_pull.json")), config_to_json(reference_push_pull_config()));
}

TEST(Config, Errors) {
    EXPECT_THROW(config_from_json(json::parse(R"({"environment": {"grid_sz": 4}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"physics": {}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"channel": {"comm_type": "smoke"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"environment": {"grid_size": "4"}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"environment": {"verbs": ["push"]}})")), ConfigError);
    EXPECT_THROW(config_from_json(json::parse(R"({"render": {"cell_px": 4}})")), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, LanguageSection) {
    const SessionConfig c = config_from_json(
        json::parse(R"({"language": {"colors": {"red": "scarlet"}, "adverbs": {"2": "two times"}}})"));
    EXPECT_EQ(c.lexicon.colors.at(Color::kRed), "scarlet");
    EXPECT_EQ(c.lexicon.adverbs.at(2), "two times");
    EXPECT_THROW(config_from_json(json::parse(R"({"language": {"colors": {"mauve": "x"}}})")), ConfigError);
}

TEST(Config, SeedFromEnvironment) {
    SessionConfig c;
    ::setenv("GRIDCOMM_SEED", "12345", 1);
    apply_env_overrides(c);
    EXPECT_EQ(c.environment.seed, 12345u);
    ::setenv("GRIDCOMM_SEED", "12x", 1);
    EXPECT_THROW(apply_env_overrides(c), ConfigError);
    ::unsetenv("GRIDCOMM_SEED");
}

// ---------------------------------------------------------------------------
// Trace

TEST(Trace, RoundTripThousandRecords) {
    Rng rng(50);
    std::vector<TraceRecord> records;
    for (int i = 0; i < 1000; ++i) records.push_back(random_record(rng));
    std::stringstream ss;
    write_trace(records, ss);
    const auto back = read_trace(ss);
    auto sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.episode_id < b.episode_id; });
    EXPECT_EQ(back, sorted);
}

TEST(Trace, StableOrderingByEpisode) {
    Rng rng(51);
    std::vector<TraceRecord> records;
    for (int i = 0; i < 30; ++i) {
        TraceRecord r = random_record(rng);
        r.episode_id = 30 - i / 3;
        r.seed = static_cast<std::uint64_t>(i);
        records.push_back(r);
    }
    std::stringstream ss;
    write_trace(records, ss);
    const auto back = read_trace(ss);
    for (std::size_t i = 1; i < back.size(); ++i) {
        ASSERT_LE(back[i - 1].episode_id, back[i].episode_id);
        if (back[i - 1].episode_id == back[i].episode_id) {
            EXPECT_LT(back[i - 1].seed, back[i].seed);
        }
    }
}

TEST(Trace, TruncatedLastLineNamesLine) {
    Rng rng(52);
    std::vector<TraceRecord> records{random_record(rng), random_record(rng), random_record(rng)};
    std::stringstream ss;
    write_trace(records, ss);
    std::string text = ss.str();
    text.resize(text.size() - 10);
    std::stringstream broken(text);
    try {
        read_trace(broken);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u) << e.what();
    }
}

TEST(Trace, BadFieldsNameLine) {
    std::stringstream ss(
        "{\"episode_id\":0,\"seed\":1,\"config_digest\":\"x\",\"concept\":\"01\",\"messages\":[],"
        "\"actions\":[],\"reward\":0}\n");
    try {
        read_trace(ss);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("line 1:", 0), 0u);
    }
    std::stringstream missing("{}\n");
    EXPECT_THROW(read_trace(missing), ParseError);
}

// ---------------------------------------------------------------------------
// Episode serialisation

TEST(Serialize, EpisodeRoundTrip) {
    Rng rng(53);
    EpisodeConfig cfg = testing_support::walk_config();
    cfg.num_obstacles = 2;
    for (int i = 0; i < 50; ++i) {
        const Episode ep = sample_episode(cfg, rng);
        const Episode back = episode_from_json(json::parse(episode_to_json(ep).dump()));
        EXPECT_EQ(back, ep);
    }
    EXPECT_THROW(episode_from_json(json::parse(R"({"width": 3})")), ParseError);
}

// ---------------------------------------------------------------------------
// Session protocol

TEST(Session, ResetTwiceWithSameSeedIsIdentical) {
    Session s(SessionConfig{});
    const std::string a = s.handle_line(R"({"cmd":"reset","seed":7})");
    const std::string b = s.handle_line(R"({"cmd":"reset","seed":7})");
    EXPECT_EQ(a, b);
    Session fresh(SessionConfig{});
    EXPECT_EQ(fresh.handle_line(R"({"cmd":"reset","seed":7})"), a);
}

TEST(Session, ViewsAreSeparated) {
    Session s(SessionConfig{});
    const json r = s.handle(json::parse(R"({"cmd":"reset","seed":3})"));
    ASSERT_TRUE(r.value("ok", false));
    const json& speaker = r["speaker"];
    const json& listener = r["listener"];
    EXPECT_EQ(speaker.size(), 2u);
    EXPECT_TRUE(speaker.contains("concept"));
    EXPECT_TRUE(speaker.contains("instruction"));
    EXPECT_FALSE(speaker.contains("grid"));
    EXPECT_FALSE(listener.contains("concept"));
    EXPECT_FALSE(listener.contains("instruction"));
    EXPECT_EQ(listener["grid"].size(), 4u);
    EXPECT_EQ(listener["grid"][0][0].get<std::string>().size(), 17u);
    // The concept string never shows up anywhere inside the listener payload.
    EXPECT_EQ(listener.dump().find(speaker["concept"].get<std::string>()), std::string::npos);

    const json step = s.handle(json::parse(R"({"cmd":"step","action":"left"})"));
    EXPECT_FALSE(step.contains("speaker"));
    EXPECT_FALSE(step["listener"].contains("concept"));
}

TEST(Session, SpeakValidation) {
    SessionConfig cfg;
    cfg.channel.mode = ChannelMode::kOneHot;
    cfg.channel.num_msgs = 2;
    cfg.channel.msg_len = 4;
    Session s(cfg);
    s.handle_line(R"({"cmd":"reset","seed":1})");
    const json bad = json::parse(s.handle_line(R"({"cmd":"speak","messages":[[1,0,0,0],[0,1,1,0]]})"));
    EXPECT_EQ(bad["error"], "VALIDATION");
    EXPECT_NE(bad["detail"].get<std::string>().find("message 1"), std::string::npos);
    EXPECT_NE(bad["detail"].get<std::string>().find("entry 2"), std::string::npos);
    const json ok = json::parse(s.handle_line(R"({"cmd":"speak","messages":[[1,0,0,0],[0,1,0,0]]})"));
    EXPECT_TRUE(ok["ok"].get<bool>());
    EXPECT_EQ(ok["listener"]["messages"][1][1], 1.0);
    const json again = json::parse(s.handle_line(R"({"cmd":"speak","messages":[[1,0,0,0],[0,1,0,0]]})"));
    EXPECT_EQ(again["error"], "BAD_STATE");
}

TEST(Session, StepAfterDoneIsBadState) {
    SessionConfig cfg;
    cfg.environment.episode_len = 2;
    cfg.environment.num_distractors = 1;
    Session s(cfg);
    ASSERT_TRUE(s.handle(json{{"cmd", "reset"}, {"seed", 5}}).contains("ok"));
    json r;
    int steps = 0;
    do {
        r = s.handle(json{{"cmd", "step"}, {"action", "left"}});
        ++steps;
    } while (!r["done"].get<bool>());
    EXPECT_LE(steps, 2);
    EXPECT_EQ(s.handle(json{{"cmd", "step"}, {"action", "left"}})["error"], "BAD_STATE");
    EXPECT_EQ(s.trace().size(), 1u);
}

TEST(Session, ErrorCodes) {
    Session s(SessionConfig{});
    EXPECT_EQ(json::parse(s.handle_line("not json"))["error"], "BAD_CMD");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"dance"})"))["error"], "BAD_CMD");
    EXPECT_EQ(json::parse(s.handle_line(R"({"nocmd":1})"))["error"], "BAD_CMD");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"step","action":"left"})"))["error"], "BAD_STATE");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"render"})"))["error"], "BAD_STATE");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"reset","config":{"channel":{"num_msgs":0}}})"))["error"],
              "CONFIG");
    s.handle_line(R"({"cmd":"reset"})");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"step","action":"jump"})"))["error"], "BAD_CMD");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"step","action":9})"))["error"], "BAD_CMD");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"baseline","kind":"telepathy"})"))["error"], "BAD_CMD");
}

TEST(Session, ActionSetSize) {
    SessionConfig cfg;
    cfg.num_actions = 4;
    Session s(cfg);
    s.handle_line(R"({"cmd":"reset","seed":2})");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"step","action":"push"})"))["error"], "BAD_CMD");
    EXPECT_TRUE(json::parse(s.handle_line(R"({"cmd":"step","action":2})")).contains("ok"));
}

TEST(Session, PerfectSpeakerNeedsCapacity) {
    SessionConfig cfg = reference_walk_config();  // categorical 3x4
    Session s(cfg);
    const json r = s.handle(json{{"cmd", "baseline"}, {"kind", "perfect_speaker"}});
    EXPECT_EQ(r["error"], "CONFIG");
    EXPECT_TRUE(s.handle(json{{"cmd", "baseline"}, {"kind", "fixed_speaker"}}).contains("ok"));
}

TEST(Session, BaselineSpeakerAndOracleView) {
    Session s(SessionConfig{});
    s.handle(json{{"cmd", "baseline"}, {"kind", "perfect_speaker"}});
    s.handle(json{{"cmd", "baseline"}, {"kind", "oracle_listener"}});
    const json r = s.handle(json{{"cmd", "reset"}, {"seed", 11}});
    ASSERT_TRUE(r.contains("ok"));
    const auto& msgs = r["listener"]["messages"];
    MessageSet m{msgs.get<std::vector<std::vector<double>>>()};
    EXPECT_EQ(decode_perfect_speaker(s.config().channel, m).to_string(), r["speaker"]["concept"]);
    int flagged = 0;
    for (const auto& row : r["listener"]["grid"]) {
        for (const auto& cell : row) {
            const std::string bits = cell.get<std::string>();
            EXPECT_EQ(bits.size(), 18u);
            flagged += bits[17] == '1' ? 1 : 0;
        }
    }
    EXPECT_EQ(flagged, 1);
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"speak","messages":[]})"))["error"], "BAD_STATE");
}

TEST(Session, RenderInlineAndFile) {
    TempDir dir;
    Session s(SessionConfig{});
    s.handle_line(R"({"cmd":"reset","seed":4})");
    const json inline_frame = json::parse(s.handle_line(R"({"cmd":"render","cell_px":8})"));
    EXPECT_EQ(inline_frame["width"], 32);
    EXPECT_EQ(inline_frame["pixels"].get<std::string>().size(), 32u * 32u * 3u * 2u);
    const std::string path = dir.file("f.ppm");
    const json file_frame = s.handle(json{{"cmd", "render"}, {"cell_px", 8}, {"out", path}});
    EXPECT_EQ(file_frame["path"], path);
    EXPECT_EQ(slurp(path).rfind("P6 32 32 255\n", 0), 0u);
}

TEST(Session, MetricsMatchLocalRecomputation) {
    Session s(SessionConfig{});
    s.handle(json{{"cmd", "baseline"}, {"kind", "random_speaker"}});
    Rng rng(7);
    for (int e = 0; e < 40; ++e) {
        s.handle(json{{"cmd", "reset"}});
        json r;
        do {
            r = s.handle(json{{"cmd", "step"}, {"action", static_cast<int>(uniform_index(rng, 8))}});
        } while (!r["done"].get<bool>());
    }
    const json m = s.handle(json{{"cmd", "metrics"}});
    const MetricsReport local = evaluate_trace(s.trace());
    EXPECT_EQ(m["records"], 40);
    ASSERT_TRUE(local.ci.value && local.cic.value && local.topsim.value);
    EXPECT_NEAR(m["ci"]["value"].get<double>(), *local.ci.value, 1e-9);
    EXPECT_NEAR(m["cic"]["value"].get<double>(), *local.cic.value, 1e-9);
    EXPECT_NEAR(m["topsim"]["value"].get<double>(), *local.topsim.value, 1e-9);
}

TEST(Session, TranscriptReplay) {
    const std::vector<std::string> transcript = {
        R"({"cmd":"reset","seed":21})",  R"({"cmd":"speak","messages":[[1,0,1,0],[0,0,0,0],[1,1,1,1],[0,1,0,1],[1,0,0,1]]})",
        R"({"cmd":"step","action":"forward"})", R"({"cmd":"step","action":"right"})",
        R"({"cmd":"render","cell_px":8})", R"({"cmd":"reset"})", R"({"cmd":"step","action":3})",
        R"({"cmd":"metrics"})", R"({"cmd":"close"})"};
    auto run = [&] {
        Session s(SessionConfig{});
        std::vector<std::string> out;
        for (const auto& line : transcript) out.push_back(s.handle_line(line));
        return out;
    };
    EXPECT_EQ(run(), run());
}

TEST(Session, ClosedSessionRejectsCommands) {
    Session s(SessionConfig{});
    s.handle_line(R"({"cmd":"close"})");
    EXPECT_EQ(json::parse(s.handle_line(R"({"cmd":"reset"})"))["error"], "BAD_STATE");
}

// ---------------------------------------------------------------------------
// Transports

TEST(Server, StdioStream) {
    TempDir dir;
    auto sink = std::make_shared<TraceSink>(dir.file("trace.jsonl"));
    std::stringstream in;
    in << R"({"cmd":"reset","seed":3})" << "\n\n" << R"({"cmd":"bogus"})" << "\n" << R"({"cmd":"close"})" << "\n"
       << R"({"cmd":"reset"})" << "\n";
    std::stringstream out;
    serve_stream(SessionConfig{}, in, out, sink);
    std::vector<std::string> lines;
    for (std::string l; std::getline(out, l);) lines.push_back(l);
    ASSERT_EQ(lines.size(), 3u);  // nothing processed after close
    EXPECT_TRUE(json::parse(lines[0]).contains("ok"));
    EXPECT_EQ(json::parse(lines[1])["error"], "BAD_CMD");
    EXPECT_TRUE(fs::exists(dir.file("trace.jsonl")));
}

TEST(Server, TcpSessionsAreIndependent) {
    TempDir dir;
    auto sink = std::make_shared<TraceSink>(dir.file("trace.jsonl"));
    TcpServer server(SessionConfig{}, 0, sink);
    std::thread loop([&] { server.run(); });

    auto talk = [&](const std::vector<std::string>& requests) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(static_cast<std::uint16_t>(server.port()));
        EXPECT_EQ(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
        std::vector<std::string> replies;
        std::string buffer;
        for (const auto& r : requests) {
            const std::string line = r + "\n";
            ::send(fd, line.data(), line.size(), 0);
            while (buffer.find('\n') == std::string::npos) {
                char chunk[4096];
                const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
                if (n <= 0) break;
                buffer.append(chunk, static_cast<std::size_t>(n));
            }
            const auto nl = buffer.find('\n');
            replies.push_back(buffer.substr(0, nl));
            buffer.erase(0, nl + 1);
        }
        ::close(fd);
        return replies;
    };

    const std::vector<std::string> script = {R"({"cmd":"reset","seed":9})", R"({"cmd":"step","action":"forward"})",
                                             R"({"cmd":"close"})"};
    std::vector<std::string> a, b;
    std::thread ta([&] { a = talk(script); });
    std::thread tb([&] { b = talk(script); });
    ta.join();
    tb.join();
    server.stop();
    loop.join();
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a, b);
    EXPECT_TRUE(json::parse(a[0]).contains("ok"));
}

// ---------------------------------------------------------------------------
// CLI

TEST(Cli, GenEpisodesIsDeterministic) {
    TempDir dir;
    ASSERT_EQ(cli({"gen-episodes", "--seed", "5", "--count", "20", "--out", dir.file("a.jsonl")}), 0);
    ASSERT_EQ(cli({"gen-episodes", "--seed", "5", "--count", "20", "--out", dir.file("b.jsonl")}), 0);
    ASSERT_EQ(cli({"gen-episodes", "--seed", "6", "--count", "20", "--out", dir.file("c.jsonl")}), 0);
    EXPECT_EQ(slurp(dir.file("a.jsonl")), slurp(dir.file("b.jsonl")));
    EXPECT_NE(slurp(dir.file("a.jsonl")), slurp(dir.file("c.jsonl")));
    std::ifstream in(dir.file("a.jsonl"));
    int lines = 0;
    for (std::string l; std::getline(in, l); ++lines) {
        const json rec = json::parse(l);
        const Episode ep = episode_from_json(rec["episode"]);
        GridState s = ep.state;
        double reward = 0;
        for (const auto& a : rec["oracle_solution"]) {
            reward += apply_action_in_place(s, ep.task, *action_from_string(a.get<std::string>()), 10).reward;
        }
        EXPECT_EQ(reward, 1.0);
    }
    EXPECT_EQ(lines, 20);
}

TEST(Cli, RolloutPerfectOracle) {
    TempDir dir;
    std::string out;
    ASSERT_EQ(cli({"rollout", "--speaker", "perfect", "--listener", "oracle", "--episodes", "100", "--out",
                   dir.file("t.jsonl")},
                  &out),
              0);
    EXPECT_EQ(out, "mean_reward 1.000\n");
    EXPECT_EQ(read_trace(dir.file("t.jsonl")).size(), 100u);
}

TEST(Cli, FixedSpeakerCiIsDegenerateValue) {
    TempDir dir;
    ASSERT_EQ(cli({"rollout", "--speaker", "fixed", "--listener", "random", "--episodes", "60", "--out",
                   dir.file("t.jsonl"), "--seed", "3"}),
              0);
    const auto records = read_trace(dir.file("t.jsonl"));
    // With one message symbol, p(m|c)=1 and p(c|m)=N(c)/N for every concept.
    std::map<std::uint32_t, int> per_concept;
    for (const auto& r : records) per_concept[r.concept_vector.symbol()] += 1;
    std::vector<std::pair<int, int>> pairs;
    int idx = 0;
    for (const auto& [sym, n] : per_concept) {
        for (int i = 0; i < n; ++i) pairs.emplace_back(idx, 0);
        ++idx;
    }
    const double expected = oracle::context_independence(oracle::dense_table(pairs, idx, 1), 0.0);
    EXPECT_NEAR(expected, 1.0 / static_cast<double>(per_concept.size()), 1e-12);

    std::string out;
    ASSERT_EQ(cli({"eval-metrics", "--trace", dir.file("t.jsonl")}, &out), 0);
    std::istringstream lines(out);
    std::string key;
    double ci = -1;
    while (lines >> key) {
        if (key == "ci") lines >> ci;
        std::getline(lines, key);
    }
    EXPECT_NEAR(ci, expected, 1e-9);
    EXPECT_NE(out.find("cic 0.000000000000"), std::string::npos);
}

TEST(Cli, RolloutIsDeterministic) {
    TempDir dir;
    for (const char* name : {"a.jsonl", "b.jsonl"}) {
        ASSERT_EQ(cli({"rollout", "--speaker", "random", "--listener", "random", "--episodes", "30", "--out",
                       dir.file(name), "--seed", "8"}),
                  0);
    }
    EXPECT_EQ(slurp(dir.file("a.jsonl")), slurp(dir.file("b.jsonl")));
}

TEST(Cli, RenderWritesPpm) {
    TempDir dir;
    ASSERT_EQ(cli({"gen-episodes", "--seed", "1", "--count", "3", "--out", dir.file("e.jsonl")}), 0);
    std::string out;
    ASSERT_EQ(cli({"render", "--episode", dir.file("e.jsonl"), "--index", "2", "--out", dir.file("f.ppm"),
                   "--cell-px", "10"},
                  &out),
              0);
    EXPECT_EQ(slurp(dir.file("f.ppm")).rfind("P6 40 40 255\n", 0), 0u);
}

TEST(Cli, ConfigFileAndErrors) {
    TempDir dir;
    {
        std::ofstream cfg(dir.file("cfg.json"));
        cfg << R"({"environment": {"grid_size": 5, "distractors": 2}, "channel": {"comm_type": "binary"}})";
    }
    EXPECT_EQ(cli({"gen-episodes", "--config", dir.file("cfg.json"), "--count", "2", "--out", dir.file("e.jsonl")}),
              0);
    EXPECT_EQ(json::parse(slurp(dir.file("e.jsonl")).substr(0, slurp(dir.file("e.jsonl")).find('\n')))["episode"]["width"],
              5);

    std::string err;
    EXPECT_NE(cli({"gen-episodes", "--count", "2", "--out", dir.file("x"), "--frobnicate"}, nullptr, &err), 0);
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
    EXPECT_NE(cli({"gen-episodes", "--config", dir.file("missing.json"), "--count", "1", "--out", dir.file("x")},
                  nullptr, &err),
              0);
    {
        std::ofstream bad(dir.file("bad.json"));
        bad << R"({"environment": {"grid_size": -1}})";
    }
    EXPECT_NE(cli({"gen-episodes", "--config", dir.file("bad.json"), "--count", "1", "--out", dir.file("x")},
                  nullptr, &err),
              0);
    EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
    EXPECT_NE(cli({"eval-metrics", "--trace", dir.file("nope.jsonl")}, nullptr, &err), 0);
    EXPECT_NE(cli({}, nullptr, &err), 0);
    EXPECT_NE(cli({"rollout", "--speaker", "loud", "--listener", "random", "--episodes", "1", "--out", "x"}), 0);
}
