#pragma once

#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridcomm/language.hpp"
#include "gridcomm/random.hpp"
#include "gridcomm/world.hpp"

namespace gridcomm {

enum class ChannelMode : std::uint8_t { kBinary, kOneHot, kContinuous };

/// Wire names: "binary", "categorical" (one-hot), "continuous".
std::string_view to_string(ChannelMode m);
std::optional<ChannelMode> channel_mode_from_string(std::string_view s);

struct ChannelConfig {
    ChannelMode mode = ChannelMode::kBinary;
    int msg_len = 4;   // d_m
    int num_msgs = 5;  // n_m
    /// Passed through to learners; the environment never samples with it.
    double temperature = 1.0;
    double cost_per_message = 0.0;

    friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

/// Throws ConfigError on non-positive shape, temperature, or negative cost.
void validate(const ChannelConfig& config);

/// One round of communication: num_msgs vectors of msg_len reals.
struct MessageSet {
    std::vector<std::vector<double>> messages;

    friend bool operator==(const MessageSet&, const MessageSet&) = default;
};

struct Violation {
    int message = -1;  // offending message index
    int entry = -1;    // offending entry, -1 for whole-message problems
    std::string reason;

    std::string describe() const;
};

/// nullopt means the message set is valid for the channel.
std::optional<Violation> validate_messages(const ChannelConfig& config, const MessageSet& msgs);

struct Capacity {
    std::uint64_t per_message = 0;  // alphabet size c
    std::uint64_t per_round = 0;    // |C| = c^n_m
};

/// Throws ContractError for continuous mode ("capacity unbounded") or on overflow.
Capacity channel_capacity(const ChannelConfig& config);

enum class BaselineKind : std::uint8_t {
    kRandomSpeaker,
    kFixedSpeaker,
    kPerfectSpeaker,
    kOracleListener,
};

std::string_view to_string(BaselineKind k);
std::optional<BaselineKind> baseline_from_string(std::string_view s);

MessageSet baseline_speak(BaselineKind kind, const ChannelConfig& config,
                          const ConceptVector& concept_vector, Rng& rng);

/// Inverse of the perfect speaker's packing.
ConceptVector decode_perfect_speaker(const ChannelConfig& config, const MessageSet& msgs);

/// Alphabet index of one discrete message (binary: entry 0 is the most
/// significant bit; one-hot: position of the set entry). Continuous
/// messages are binned uniformly over [0,1] with `bins` levels per entry.
std::int64_t message_symbol(const ChannelConfig& config, const std::vector<double>& message,
                            int bins = 8);

// ---------------------------------------------------------------------------

inline constexpr int kOracleCellBits = kCellBits + 1;
using OracleCellBits = std::bitset<kOracleCellBits>;

struct OracleGridEncoding {
    int width = 0;
    int height = 0;
    std::vector<OracleCellBits> cells;  // row-major

    const OracleCellBits& at(int row, int col) const {
        return cells.at(static_cast<std::size_t>(row * width + col));
    }
};

/// Extends every cell by a target-indicator bit (index 17).
OracleGridEncoding oracle_listener_view(const GridEncoding& grid, Position target);

/// reward - cost_per_message * num_msgs * rounds.
double apply_signalling_cost(const StepOutcome& outcome, const ChannelConfig& config,
                             int rounds_of_communication);

}  // namespace gridcomm
