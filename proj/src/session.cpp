#include "gridcomm/session.hpp"

#include "gridcomm/error.hpp"
#include "gridcomm/render.hpp"

namespace gridcomm {

using nlohmann::json;

namespace {

// Each failure mode maps to one protocol error code.
struct ProtocolFailure {
    std::string code;
    std::string detail;
};

[[noreturn]] void fail(const char* code, const std::string& detail) {
    throw ProtocolFailure{code, detail};
}

// Independent streams for the scripted speaker and the illumination draw, so
// installing a speaker never changes what the listener sees.
constexpr std::uint64_t kSpeakerStream = 0x7370656b72ULL;
constexpr std::uint64_t kLightStream = 0x6c69676874ULL;

template <std::size_t N>
std::string bits_string(const std::bitset<N>& b) {
    std::string s(N, '0');
    for (std::size_t i = 0; i < N; ++i) {
        if (b.test(i)) s[i] = '1';
    }
    return s;
}

MessageSet messages_from_json(const json& v) {
    if (!v.is_array()) fail("VALIDATION", "messages must be a list of lists of numbers");
    MessageSet m;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array()) fail("VALIDATION", "message " + std::to_string(i) + " is not a list");
        std::vector<double> row;
        for (std::size_t j = 0; j < v[i].size(); ++j) {
            if (!v[i][j].is_number()) {
                fail("VALIDATION", "message " + std::to_string(i) + " entry " + std::to_string(j) +
                                       " is not a number");
            }
            row.push_back(v[i][j].get<double>());
        }
        m.messages.push_back(std::move(row));
    }
    return m;
}

Action action_from_request(const json& v, int num_actions) {
    std::optional<Action> a;
    if (v.is_string()) {
        a = action_from_string(v.get<std::string>());
        if (!a) fail("BAD_CMD", "unknown action '" + v.get<std::string>() + "'");
    } else if (v.is_number_integer()) {
        const auto idx = v.get<long long>();
        if (idx < 0 || idx >= kNumActions) fail("BAD_CMD", "action index out of range: " + v.dump());
        a = action_from_index(static_cast<int>(idx));
    } else {
        fail("BAD_CMD", "action must be a name or an index");
    }
    if (static_cast<int>(*a) >= num_actions) {
        fail("BAD_CMD", "action '" + std::string(to_string(*a)) + "' is outside the configured " +
                            std::to_string(num_actions) + "-action set");
    }
    return *a;
}

json metric_json(const MetricValue& m) {
    json out{{"value", m.value ? json(*m.value) : json(nullptr)}};
    if (!m.error.empty()) out["error"] = m.error;
    return out;
}

}  // namespace

json protocol_error(const std::string& code, const std::string& detail) {
    return json{{"error", code}, {"detail", detail}};
}

Session::Session(SessionConfig config, std::shared_ptr<TraceSink> sink)
    : base_config_(config), config_(std::move(config)), sink_(std::move(sink)) {
    digest_ = config_digest(config_);
}

std::string Session::handle_line(const std::string& line) {
    json req;
    try {
        req = json::parse(line);
    } catch (const json::parse_error&) {
        return protocol_error("BAD_CMD", "request is not valid JSON").dump();
    }
    return handle(req).dump();
}

json Session::handle(const json& req) {
    try {
        if (!req.is_object() || !req.contains("cmd") || !req["cmd"].is_string()) {
            fail("BAD_CMD", "request must be an object with a string field 'cmd'");
        }
        const std::string cmd = req["cmd"].get<std::string>();
        if (closed_) fail("BAD_STATE", "session is closed");
        if (cmd == "reset") return reset(req);
        if (cmd == "speak") return speak(req);
        if (cmd == "step") return step(req);
        if (cmd == "baseline") return baseline(req);
        if (cmd == "render") return render(req);
        if (cmd == "metrics") return metrics(req);
        if (cmd == "close") return close();
        fail("BAD_CMD", "unknown cmd '" + cmd + "'");
    } catch (const ProtocolFailure& f) {
        return protocol_error(f.code, f.detail);
    } catch (const ConfigError& e) {
        return protocol_error("CONFIG", e.what());
    } catch (const UnsolvableError& e) {
        return protocol_error("CONFIG", e.what());
    } catch (const json::exception& e) {
        return protocol_error("BAD_CMD", e.what());
    } catch (const Error& e) {
        return protocol_error("BAD_STATE", e.what());
    }
}

json Session::reset(const json& req) {
    SessionConfig next = config_;
    if (req.contains("config")) next = config_from_json(req["config"], base_config_);

    std::uint64_t seed = 0;
    if (req.contains("seed")) {
        const json& s = req["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            fail("BAD_CMD", "seed must be a non-negative integer");
        }
        seed = s.get<std::uint64_t>();
    } else {
        seed = mix_seed(next.environment.seed + static_cast<std::uint64_t>(next_episode_id_));
    }

    Rng env_rng(seed);
    Episode ep = sample_episode(next.environment, env_rng, next.lexicon);
    Rng speaker_rng(mix_seed(seed ^ kSpeakerStream));
    Rng light_rng(mix_seed(seed ^ kLightStream));

    std::optional<MessageSet> scripted;
    if (speaker_baseline_) {
        try {
            scripted = baseline_speak(*speaker_baseline_, next.channel, ep.concept_vector, speaker_rng);
        } catch (const ContractError& e) {
            throw ConfigError(std::string("baseline speaker: ") + e.what());
        }
    }

    config_ = std::move(next);
    digest_ = config_digest(config_);
    episode_ = std::move(ep);
    episode_id_ = next_episode_id_++;
    episode_seed_ = seed;
    illumination_ = sample_illumination(episode_->lights_out_active, light_rng);
    messages_.reset();
    actions_.clear();
    return_ = 0.0;
    done_ = false;
    if (scripted) store_messages(*scripted);

    json listener{{"grid", listener_grid()}};
    if (messages_) listener["messages"] = listener_messages();
    return json{{"ok", true},
                {"seed", seed},
                {"speaker",
                 {{"concept", episode_->concept_vector.to_string()},
                  {"instruction", episode_->instruction.text()}}},
                {"listener", listener}};
}

json Session::speak(const json& req) {
    if (!episode_) fail("BAD_STATE", "speak before reset");
    if (done_) fail("BAD_STATE", "episode is done");
    if (speaker_baseline_) fail("BAD_STATE", "a baseline speaker is installed");
    if (messages_) fail("BAD_STATE", "messages already sent this round");
    if (!actions_.empty()) fail("BAD_STATE", "the listener has already acted");
    if (!req.contains("messages")) fail("BAD_CMD", "speak needs 'messages'");
    const MessageSet msgs = messages_from_json(req["messages"]);
    if (auto v = validate_messages(config_.channel, msgs)) fail("VALIDATION", v->describe());
    store_messages(msgs);
    return json{{"ok", true}, {"listener", {{"messages", listener_messages()}}}};
}

json Session::step(const json& req) {
    if (!episode_) fail("BAD_STATE", "step before reset");
    if (done_) fail("BAD_STATE", "episode is done; reset first");
    if (!req.contains("action")) fail("BAD_CMD", "step needs 'action'");
    const Action action = action_from_request(req["action"], config_.num_actions);

    const StepOutcome out = apply_action_in_place(episode_->state, episode_->task, action,
                                                  config_.environment.episode_len);
    actions_.push_back(action);
    return_ += out.reward;
    done_ = out.done;
    const int rounds = messages_ ? 1 : 0;
    const double adjusted = apply_signalling_cost(out, config_.channel, rounds);

    json response{{"ok", true},
                  {"listener", {{"grid", listener_grid()}}},
                  {"reward", out.reward},
                  {"adjusted_reward", adjusted},
                  {"done", out.done},
                  {"info", out.info}};
    if (done_) finish_episode();
    return response;
}

json Session::baseline(const json& req) {
    if (!req.contains("kind") || !req["kind"].is_string()) fail("BAD_CMD", "baseline needs 'kind'");
    const std::string kind = req["kind"].get<std::string>();
    if (kind == "none") {
        speaker_baseline_.reset();
        oracle_view_ = false;
    } else {
        const auto k = baseline_from_string(kind);
        if (!k) fail("BAD_CMD", "unknown baseline '" + kind + "'");
        if (*k == BaselineKind::kOracleListener) {
            oracle_view_ = true;
        } else {
            // Reject speakers the channel cannot carry before any episode uses them.
            Rng probe(0);
            try {
                (void)baseline_speak(*k, config_.channel, all_concepts().front(), probe);
            } catch (const ContractError& e) {
                fail("CONFIG", std::string("baseline speaker: ") + e.what());
            }
            speaker_baseline_ = *k;
        }
    }
    return json{{"ok", true},
                {"speaker", speaker_baseline_ ? json(std::string(to_string(*speaker_baseline_)))
                                              : json(nullptr)},
                {"oracle_view", oracle_view_}};
}

json Session::render(const json& req) {
    if (!episode_) fail("BAD_STATE", "render before reset");
    int px = config_.render.cell_px;
    if (req.contains("cell_px")) {
        if (!req["cell_px"].is_number_integer()) fail("BAD_CMD", "cell_px must be an integer");
        px = req["cell_px"].get<int>();
    }
    if (px < kMinCellPx) fail("BAD_CMD", "cell_px must be at least " + std::to_string(kMinCellPx));
    const Frame frame = apply_lights_out(render_grid(episode_->state, px), illumination_);
    json out{{"ok", true}, {"width", frame.width}, {"height", frame.height}};
    if (req.contains("out")) {
        if (!req["out"].is_string()) fail("BAD_CMD", "out must be a path");
        const std::string path = req["out"].get<std::string>();
        write_ppm(frame, path);
        out["path"] = path;
    } else {
        out["format"] = "rgb8-hex";
        out["pixels"] = frame_hex(frame);
    }
    return out;
}

json Session::metrics(const json& req) {
    SymbolView view = SymbolView::kConcatenated;
    if (req.contains("view")) {
        const std::string v = req["view"].is_string() ? req["view"].get<std::string>() : "";
        if (v == "concatenated") {
            view = SymbolView::kConcatenated;
        } else if (v == "per_attribute") {
            view = SymbolView::kPerAttribute;
        } else {
            fail("BAD_CMD", "view must be concatenated or per_attribute");
        }
    }
    double alpha = 0.0;
    if (req.contains("alpha")) {
        if (!req["alpha"].is_number() || req["alpha"].get<double>() < 0.0) {
            fail("BAD_CMD", "alpha must be a non-negative number");
        }
        alpha = req["alpha"].get<double>();
    }
    const MetricsReport r = evaluate_trace(trace_, view, alpha);
    return json{{"ok", true},
                {"records", r.records},
                {"ci", metric_json(r.ci)},
                {"cic", metric_json(r.cic)},
                {"topsim", metric_json(r.topsim)}};
}

json Session::close() {
    if (sink_) sink_->flush();
    closed_ = true;
    return json{{"ok", true}, {"records", trace_.size()}};
}

json Session::listener_grid() const {
    const GridEncoding enc = grid_encoding(episode_->state);
    json rows = json::array();
    if (oracle_view_) {
        const auto target = episode_->state.find_object(episode_->task.target_id);
        // A carried target travels with the agent.
        const Position at = target ? *target : episode_->state.agent.position;
        const OracleGridEncoding o = oracle_listener_view(enc, at);
        for (int r = 0; r < o.height; ++r) {
            json row = json::array();
            for (int c = 0; c < o.width; ++c) row.push_back(bits_string(o.at(r, c)));
            rows.push_back(std::move(row));
        }
    } else {
        for (int r = 0; r < enc.height; ++r) {
            json row = json::array();
            for (int c = 0; c < enc.width; ++c) row.push_back(bits_string(enc.at(r, c)));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

json Session::listener_messages() const { return messages_->messages; }

void Session::store_messages(const MessageSet& msgs) { messages_ = msgs; }

void Session::finish_episode() {
    TraceRecord rec;
    rec.episode_id = episode_id_;
    rec.seed = episode_seed_;
    rec.config_digest = digest_;
    rec.concept_vector = episode_->concept_vector;
    if (messages_) {
        std::vector<std::int64_t> symbols;
        for (const auto& m : messages_->messages) symbols.push_back(message_symbol(config_.channel, m));
        rec.rounds.push_back(std::move(symbols));
        if (config_.channel.mode == ChannelMode::kContinuous) rec.raw_rounds.push_back(*messages_);
    }
    rec.actions = actions_;
    rec.reward = return_;
    trace_.push_back(rec);
    if (sink_) sink_->append(std::span<const TraceRecord>(&rec, 1));
}

}  // namespace gridcomm
