#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridcomm/language.hpp"
#include "gridcomm/random.hpp"
#include "gridcomm/world.hpp"

namespace gridcomm {

enum class WeightMode : std::uint8_t { kTiedToSize, kIndependent };

std::string_view to_string(WeightMode m);
std::optional<WeightMode> weight_mode_from_string(std::string_view s);

/// Sizes 1-2 are light and 3-4 heavy when weight is tied to size.
constexpr Weight weight_for_size(int size) { return size <= 2 ? Weight::kLight : Weight::kHeavy; }

struct EpisodeConfig {
    int grid_size = 4;
    int num_distractors = 4;
    double other_objects_sample_percentage = 0.0;
    WeightMode weight_mode = WeightMode::kTiedToSize;
    bool enable_maze = false;
    double maze_density = 0.0;
    double maze_complexity = 0.0;
    int num_obstacles = 0;
    int episode_len = 10;
    std::vector<Verb> verb_set{Verb::kWalk};
    GrammarKind grammar_kind = GrammarKind::kSimpleIntrans;
    /// Upper bound for the numeral-adverb multiplier of push/pull tasks.
    int max_count = 1;
    double lights_out_prob = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const EpisodeConfig&, const EpisodeConfig&) = default;
};

/// Throws ConfigError describing the first invalid field.
void validate(const EpisodeConfig& config);

struct Episode {
    GridState state;
    TaskSpec task;
    Instruction instruction;
    ConceptVector concept_vector;
    bool lights_out_active = false;

    const ObjectSpec& target() const;
    friend bool operator==(const Episode&, const Episode&) = default;
};

inline constexpr int kMaxSampleAttempts = 1000;
/// Solver state budget; larger searches count as unsolvable.
inline constexpr std::size_t kMaxSearchNodes = 2000000;

/// Rejection-samples until the episode is solvable within episode_len.
Episode sample_episode(const EpisodeConfig& config, Rng& rng,
                       const Lexicon& lexicon = Lexicon::standard());

/// Obstacle cells for a maze or scattered obstacles, sorted row-major.
std::vector<Position> generate_maze(const EpisodeConfig& config, Rng& rng);

bool is_solvable(const GridState& state, const TaskSpec& task, int max_steps);

/// A shortest action sequence that ends with reward 1. Throws
/// UnsolvableError when none exists within max_steps.
std::vector<Action> oracle_solve(const GridState& state, const TaskSpec& task, int max_steps);

}  // namespace gridcomm
