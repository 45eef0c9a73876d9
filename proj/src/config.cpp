#include "gridcomm/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "gridcomm/error.hpp"

namespace gridcomm {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) bad(where, "expected an integer");
    return v.get<int>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where, "expected a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& where) {
    if (!v.is_boolean()) bad(where, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& where) {
    if (!v.is_string()) bad(where, "expected a string");
    return v.get<std::string>();
}

void read_environment(const json& sec, SessionConfig& cfg) {
    EpisodeConfig& env = cfg.environment;
    for (const auto& [key, v] : sec.items()) {
        const std::string where = "environment." + key;
        if (key == "grid_size") {
            env.grid_size = as_int(v, where);
        } else if (key == "distractors") {
            env.num_distractors = as_int(v, where);
        } else if (key == "other_objects_sample_percentage") {
            env.other_objects_sample_percentage = as_number(v, where);
        } else if (key == "weights") {
            const auto m = weight_mode_from_string(as_string(v, where));
            if (!m) bad(where, "expected tied_to_size or independent");
            env.weight_mode = *m;
        } else if (key == "enable_maze") {
            env.enable_maze = as_bool(v, where);
        } else if (key == "maze_density") {
            env.maze_density = as_number(v, where);
        } else if (key == "maze_complexity") {
            env.maze_complexity = as_number(v, where);
        } else if (key == "num_obstacles") {
            env.num_obstacles = as_int(v, where);
        } else if (key == "episode_len") {
            env.episode_len = as_int(v, where);
        } else if (key == "verbs") {
            if (!v.is_array()) bad(where, "expected a list of verbs");
            env.verb_set.clear();
            for (const auto& item : v) {
                const auto verb = verb_from_string(as_string(item, where));
                if (!verb) bad(where, "unknown verb " + item.dump());
                env.verb_set.push_back(*verb);
            }
        } else if (key == "type_grammar") {
            const auto g = grammar_from_string(as_string(v, where));
            if (!g) bad(where, "expected simple_intrans or simple_trans");
            env.grammar_kind = *g;
        } else if (key == "max_count") {
            env.max_count = as_int(v, where);
        } else if (key == "lights_out") {
            env.lights_out_prob = as_number(v, where);
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                bad(where, "expected a non-negative integer");
            }
            env.seed = v.get<std::uint64_t>();
        } else if (key == "num_actions") {
            cfg.num_actions = as_int(v, where);
        } else if (key == "num_episodes") {
            cfg.num_episodes = as_int(v, where);
        } else if (key == "grid_input_type") {
            cfg.grid_input_type = as_string(v, where);
        } else {
            bad(where, "unknown field");
        }
    }
}

void read_channel(const json& sec, ChannelConfig& ch) {
    for (const auto& [key, v] : sec.items()) {
        const std::string where = "channel." + key;
        if (key == "comm_type") {
            const auto m = channel_mode_from_string(as_string(v, where));
            if (!m) bad(where, "expected binary, categorical or continuous");
            ch.mode = *m;
        } else if (key == "msg_len") {
            ch.msg_len = as_int(v, where);
        } else if (key == "num_msgs") {
            ch.num_msgs = as_int(v, where);
        } else if (key == "temp") {
            ch.temperature = as_number(v, where);
        } else if (key == "cost_per_message") {
            ch.cost_per_message = as_number(v, where);
        } else {
            bad(where, "unknown field");
        }
    }
}

void read_render(const json& sec, RenderConfig& r) {
    for (const auto& [key, v] : sec.items()) {
        const std::string where = "render." + key;
        if (key == "cell_px") {
            r.cell_px = as_int(v, where);
        } else {
            bad(where, "unknown field");
        }
    }
}

template <typename Enum>
void read_words(const json& sec, const std::string& where, std::map<Enum, std::string>& table,
                std::optional<Enum> (*parse)(std::string_view)) {
    if (!sec.is_object()) bad(where, "expected an object");
    for (const auto& [key, v] : sec.items()) {
        const auto e = parse(key);
        if (!e) bad(where + "." + key, "unknown entry");
        table[*e] = as_string(v, where + "." + key);
    }
}

void read_language(const json& sec, Lexicon& lex) {
    for (const auto& [key, v] : sec.items()) {
        const std::string where = "language." + key;
        if (key == "verbs") {
            read_words(v, where, lex.verbs, &verb_from_string);
        } else if (key == "shapes") {
            read_words(v, where, lex.shapes, &shape_from_string);
        } else if (key == "colors") {
            read_words(v, where, lex.colors, &color_from_string);
        } else if (key == "weights") {
            read_words(v, where, lex.weights, &weight_from_string);
        } else if (key == "adverbs") {
            if (!v.is_object()) bad(where, "expected an object");
            for (const auto& [count, word] : v.items()) {
                int n = 0;
                try {
                    n = std::stoi(count);
                } catch (const std::exception&) {
                    bad(where + "." + count, "expected a count key");
                }
                if (n < 2 || n > kMaxCount) bad(where + "." + count, "count outside 2..4");
                lex.adverbs[n] = as_string(word, where + "." + count);
            }
        } else if (key == "size_prefix") {
            lex.size_prefix = as_string(v, where);
        } else if (key == "direction_word") {
            lex.direction_word = as_string(v, where);
        } else if (key == "article") {
            lex.article = as_string(v, where);
        } else {
            bad(where, "unknown field");
        }
    }
}

template <typename Map>
json words_json(const Map& table) {
    json out = json::object();
    for (const auto& [k, w] : table) out[std::string(to_string(k))] = w;
    return out;
}

}  // namespace

SessionConfig config_from_json(const json& doc, const SessionConfig& base) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    SessionConfig cfg = base;
    for (const auto& [key, sec] : doc.items()) {
        if (!sec.is_object()) bad(key, "expected an object");
        if (key == "environment") {
            read_environment(sec, cfg);
        } else if (key == "channel") {
            read_channel(sec, cfg.channel);
        } else if (key == "render") {
            read_render(sec, cfg.render);
        } else if (key == "language") {
            read_language(sec, cfg.lexicon);
        } else {
            bad(key, "unknown section");
        }
    }
    validate(cfg.environment);
    validate(cfg.channel);
    if (cfg.render.cell_px < 8) bad("render.cell_px", "must be at least 8");
    if (cfg.num_actions != 4 && cfg.num_actions != 6 && cfg.num_actions != 8) {
        bad("environment.num_actions", "must be 4, 6 or 8");
    }
    if (cfg.num_episodes < 1) bad("environment.num_episodes", "must be positive");
    if (cfg.grid_input_type != "vector" && cfg.grid_input_type != "image") {
        bad("environment.grid_input_type", "expected vector or image");
    }
    return cfg;
}

json config_to_json(const SessionConfig& c) {
    const EpisodeConfig& e = c.environment;
    json verbs = json::array();
    for (Verb v : e.verb_set) verbs.push_back(std::string(to_string(v)));
    json adverbs = json::object();
    for (const auto& [n, w] : c.lexicon.adverbs) adverbs[std::to_string(n)] = w;
    return json{
        {"environment",
         {{"grid_size", e.grid_size},
          {"distractors", e.num_distractors},
          {"other_objects_sample_percentage", e.other_objects_sample_percentage},
          {"weights", std::string(to_string(e.weight_mode))},
          {"enable_maze", e.enable_maze},
          {"maze_density", e.maze_density},
          {"maze_complexity", e.maze_complexity},
          {"num_obstacles", e.num_obstacles},
          {"episode_len", e.episode_len},
          {"verbs", verbs},
          {"type_grammar", std::string(to_string(e.grammar_kind))},
          {"max_count", e.max_count},
          {"lights_out", e.lights_out_prob},
          {"seed", e.seed},
          {"num_actions", c.num_actions},
          {"num_episodes", c.num_episodes},
          {"grid_input_type", c.grid_input_type}}},
        {"channel",
         {{"comm_type", std::string(to_string(c.channel.mode))},
          {"msg_len", c.channel.msg_len},
          {"num_msgs", c.channel.num_msgs},
          {"temp", c.channel.temperature},
          {"cost_per_message", c.channel.cost_per_message}}},
        {"render", {{"cell_px", c.render.cell_px}}},
        {"language",
         {{"verbs", words_json(c.lexicon.verbs)},
          {"shapes", words_json(c.lexicon.shapes)},
          {"colors", words_json(c.lexicon.colors)},
          {"weights", words_json(c.lexicon.weights)},
          {"adverbs", adverbs},
          {"size_prefix", c.lexicon.size_prefix},
          {"direction_word", c.lexicon.direction_word},
          {"article", c.lexicon.article}}},
    };
}

SessionConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

void apply_env_overrides(SessionConfig& config) {
    const char* seed = std::getenv("GRIDCOMM_SEED");
    if (seed == nullptr || *seed == '\0') return;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(seed, &end, 10);
    if (end == nullptr || *end != '\0') throw ConfigError("GRIDCOMM_SEED must be an unsigned integer");
    config.environment.seed = v;
}

std::string config_digest(const SessionConfig& config) {
    const std::string canonical = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SessionConfig reference_walk_config() {
    SessionConfig c;
    c.environment.grid_size = 4;
    c.environment.num_distractors = 4;
    c.environment.episode_len = 10;
    c.environment.verb_set = {Verb::kWalk};
    c.environment.grammar_kind = GrammarKind::kSimpleIntrans;
    c.environment.enable_maze = false;
    c.channel.mode = ChannelMode::kOneHot;
    c.channel.num_msgs = 3;
    c.channel.msg_len = 4;
    c.num_actions = 4;
    c.num_episodes = 200000;
    return c;
}

SessionConfig reference_push_pull_config() {
    SessionConfig c = reference_walk_config();
    c.environment.num_distractors = 2;
    c.environment.verb_set = {Verb::kPush, Verb::kPull};
    c.environment.grammar_kind = GrammarKind::kSimpleTrans;
    c.num_actions = 6;
    c.num_episodes = 400000;
    return c;
}

}  // namespace gridcomm
