#include "gridcomm/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gridcomm/error.hpp"

namespace gridcomm {

std::string_view to_string(ChannelMode m) {
    switch (m) {
        case ChannelMode::kBinary: return "binary";
        case ChannelMode::kOneHot: return "categorical";
        case ChannelMode::kContinuous: return "continuous";
    }
    return "?";
}

std::optional<ChannelMode> channel_mode_from_string(std::string_view s) {
    if (s == "binary") return ChannelMode::kBinary;
    if (s == "categorical" || s == "one_hot") return ChannelMode::kOneHot;
    if (s == "continuous") return ChannelMode::kContinuous;
    return std::nullopt;
}

void validate(const ChannelConfig& c) {
    if (c.msg_len < 1) throw ConfigError("msg_len must be at least 1");
    if (c.num_msgs < 1) throw ConfigError("num_msgs must be at least 1");
    if (!(c.temperature > 0.0)) throw ConfigError("temperature must be positive");
    if (!(c.cost_per_message >= 0.0)) throw ConfigError("cost_per_message must be non-negative");
}

std::string Violation::describe() const {
    std::string s = "message " + std::to_string(message);
    if (entry >= 0) s += " entry " + std::to_string(entry);
    return s + ": " + reason;
}

std::optional<Violation> validate_messages(const ChannelConfig& config, const MessageSet& msgs) {
    const auto& m = msgs.messages;
    if (static_cast<int>(m.size()) != config.num_msgs) {
        return Violation{static_cast<int>(std::min<std::size_t>(m.size(), config.num_msgs)), -1,
                         "expected " + std::to_string(config.num_msgs) + " messages, got " +
                             std::to_string(m.size())};
    }
    for (int i = 0; i < config.num_msgs; ++i) {
        const auto& msg = m[static_cast<std::size_t>(i)];
        if (static_cast<int>(msg.size()) != config.msg_len) {
            return Violation{i, -1,
                             "expected length " + std::to_string(config.msg_len) + ", got " +
                                 std::to_string(msg.size())};
        }
        int ones = 0;
        for (int j = 0; j < config.msg_len; ++j) {
            const double v = msg[static_cast<std::size_t>(j)];
            if (!std::isfinite(v)) return Violation{i, j, "non-finite entry"};
            if (config.mode == ChannelMode::kContinuous) continue;
            if (v != 0.0 && v != 1.0) return Violation{i, j, "entry is not 0 or 1"};
            if (v == 1.0 && ++ones > 1 && config.mode == ChannelMode::kOneHot) {
                return Violation{i, j, "second set bit in a one-hot message"};
            }
        }
        if (config.mode == ChannelMode::kOneHot && ones == 0) {
            return Violation{i, -1, "one-hot message has no set bit"};
        }
    }
    return std::nullopt;
}

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    std::uint64_t out = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) {
            throw ContractError("channel capacity exceeds 64 bits");
        }
        out *= base;
    }
    return out;
}

}  // namespace

Capacity channel_capacity(const ChannelConfig& config) {
    validate(config);
    Capacity cap;
    switch (config.mode) {
        case ChannelMode::kBinary: cap.per_message = checked_pow(2, config.msg_len); break;
        case ChannelMode::kOneHot: cap.per_message = static_cast<std::uint64_t>(config.msg_len); break;
        case ChannelMode::kContinuous: throw ContractError("capacity unbounded");
    }
    cap.per_round = checked_pow(cap.per_message, config.num_msgs);
    return cap;
}

std::string_view to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::kRandomSpeaker: return "random_speaker";
        case BaselineKind::kFixedSpeaker: return "fixed_speaker";
        case BaselineKind::kPerfectSpeaker: return "perfect_speaker";
        case BaselineKind::kOracleListener: return "oracle_listener";
    }
    return "?";
}

std::optional<BaselineKind> baseline_from_string(std::string_view s) {
    for (auto k : {BaselineKind::kRandomSpeaker, BaselineKind::kFixedSpeaker,
                   BaselineKind::kPerfectSpeaker, BaselineKind::kOracleListener}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

namespace {

// Concept groups in the order the one-hot perfect speaker sends them.
struct Group {
    int base;
    int width;
};
constexpr std::array<Group, 5> kGroups{{{concept_bit::kSize, 4},
                                        {concept_bit::kShape, 4},
                                        {concept_bit::kColor, 4},
                                        {concept_bit::kWeight, 2},
                                        {concept_bit::kTask, 4}}};

MessageSet blank(const ChannelConfig& c) {
    return {std::vector<std::vector<double>>(
        static_cast<std::size_t>(c.num_msgs),
        std::vector<double>(static_cast<std::size_t>(c.msg_len), 0.0))};
}

MessageSet random_speak(const ChannelConfig& c, Rng& rng) {
    MessageSet out = blank(c);
    for (auto& msg : out.messages) {
        switch (c.mode) {
            case ChannelMode::kBinary:
                for (auto& v : msg) v = static_cast<double>(uniform_index(rng, 2));
                break;
            case ChannelMode::kOneHot:
                msg[uniform_index(rng, msg.size())] = 1.0;
                break;
            case ChannelMode::kContinuous:
                for (auto& v : msg) v = uniform_unit(rng);
                break;
        }
    }
    return out;
}

MessageSet fixed_speak(const ChannelConfig& c) {
    MessageSet out = blank(c);
    for (auto& msg : out.messages) {
        if (c.mode == ChannelMode::kOneHot) {
            msg[0] = 1.0;
        } else {
            std::fill(msg.begin(), msg.end(), 1.0);
        }
    }
    return out;
}

MessageSet perfect_speak(const ChannelConfig& c, const ConceptVector& concept_vector) {
    MessageSet out = blank(c);
    if (c.mode == ChannelMode::kOneHot) {
        if (c.num_msgs < 5 || c.msg_len < 4) {
            throw ContractError("perfect speaker needs at least 5 one-hot messages of length 4");
        }
        for (std::size_t g = 0; g < kGroups.size(); ++g) {
            int hot = -1;
            for (int i = 0; i < kGroups[g].width; ++i) {
                if (concept_vector.bits.test(static_cast<std::size_t>(kGroups[g].base + i))) hot = i;
            }
            if (hot < 0) throw ContractError("perfect speaker cannot send an empty concept group");
            out.messages[g][static_cast<std::size_t>(hot)] = 1.0;
        }
        for (std::size_t g = kGroups.size(); g < out.messages.size(); ++g) out.messages[g][0] = 1.0;
        return out;
    }
    if (c.num_msgs * c.msg_len < kConceptBits) {
        throw ContractError("perfect speaker needs num_msgs * msg_len >= 18");
    }
    for (int b = 0; b < kConceptBits; ++b) {
        if (concept_vector.bits.test(static_cast<std::size_t>(b))) {
            out.messages[static_cast<std::size_t>(b / c.msg_len)]
                        [static_cast<std::size_t>(b % c.msg_len)] = 1.0;
        }
    }
    return out;
}

}  // namespace

MessageSet baseline_speak(BaselineKind kind, const ChannelConfig& config,
                          const ConceptVector& concept_vector, Rng& rng) {
    validate(config);
    switch (kind) {
        case BaselineKind::kRandomSpeaker: return random_speak(config, rng);
        case BaselineKind::kFixedSpeaker: return fixed_speak(config);
        case BaselineKind::kPerfectSpeaker: return perfect_speak(config, concept_vector);
        case BaselineKind::kOracleListener: break;
    }
    throw ContractError("oracle_listener is not a speaker");
}

ConceptVector decode_perfect_speaker(const ChannelConfig& config, const MessageSet& msgs) {
    if (auto v = validate_messages(config, msgs)) {
        throw ContractError("invalid message set: " + v->describe());
    }
    ConceptVector c;
    if (config.mode == ChannelMode::kOneHot) {
        if (config.num_msgs < 5) throw ContractError("too few messages for a concept");
        for (std::size_t g = 0; g < kGroups.size(); ++g) {
            const auto& msg = msgs.messages[g];
            for (int i = 0; i < kGroups[g].width; ++i) {
                if (msg[static_cast<std::size_t>(i)] == 1.0) {
                    c.bits.set(static_cast<std::size_t>(kGroups[g].base + i));
                }
            }
        }
        return c;
    }
    if (config.num_msgs * config.msg_len < kConceptBits) {
        throw ContractError("too few entries for a concept");
    }
    for (int b = 0; b < kConceptBits; ++b) {
        const double v = msgs.messages[static_cast<std::size_t>(b / config.msg_len)]
                                      [static_cast<std::size_t>(b % config.msg_len)];
        c.bits.set(static_cast<std::size_t>(b), v >= 0.5);
    }
    return c;
}

std::int64_t message_symbol(const ChannelConfig& config, const std::vector<double>& message,
                            int bins) {
    std::int64_t sym = 0;
    switch (config.mode) {
        case ChannelMode::kBinary:
            if (message.size() > 62) throw ContractError("binary message too long to index");
            for (double v : message) sym = sym * 2 + (v >= 0.5 ? 1 : 0);
            return sym;
        case ChannelMode::kOneHot:
            for (std::size_t i = 0; i < message.size(); ++i) {
                if (message[i] == 1.0) return static_cast<std::int64_t>(i);
            }
            throw ContractError("one-hot message has no set entry");
        case ChannelMode::kContinuous: {
            if (bins < 1) throw ContractError("bins must be positive");
            const double limit = std::pow(static_cast<double>(bins), static_cast<double>(message.size()));
            if (limit > 9.0e18) throw ContractError("continuous message too long to index");
            for (double v : message) {
                const double clamped = std::clamp(v, 0.0, 1.0);
                const auto bin = std::min<std::int64_t>(
                    bins - 1, static_cast<std::int64_t>(std::floor(clamped * bins)));
                sym = sym * bins + bin;
            }
            return sym;
        }
    }
    return sym;
}

OracleGridEncoding oracle_listener_view(const GridEncoding& grid, Position target) {
    if (target.col < 0 || target.row < 0 || target.col >= grid.width ||
        target.row >= grid.height) {
        throw ContractError("target position outside the grid");
    }
    OracleGridEncoding out{grid.width, grid.height, {}};
    out.cells.reserve(grid.cells.size());
    for (const CellBits& cell : grid.cells) {
        // bitset<17> fits in an unsigned long on every supported platform.
        out.cells.emplace_back(cell.to_ulong());
    }
    out.cells[static_cast<std::size_t>(target.row * grid.width + target.col)].set(kCellBits);
    return out;
}

double apply_signalling_cost(const StepOutcome& outcome, const ChannelConfig& config,
                             int rounds_of_communication) {
    if (config.cost_per_message < 0.0) throw ContractError("negative signalling cost");
    if (rounds_of_communication < 0) throw ContractError("negative round count");
    return outcome.reward -
           config.cost_per_message * config.num_msgs * static_cast<double>(rounds_of_communication);
}

}  // namespace gridcomm
