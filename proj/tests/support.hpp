#pragma once

// Seeded generators shared by the property tests.

#include <cstdint>
#include <utility>
#include <vector>

#include "gridcomm/episode.hpp"
#include "gridcomm/random.hpp"
#include "gridcomm/world.hpp"

namespace testing_support {

using namespace gridcomm;

inline EpisodeConfig walk_config(std::uint64_t seed = 0) {
    EpisodeConfig c;
    c.grid_size = 4;
    c.num_distractors = 4;
    c.episode_len = 10;
    c.seed = seed;
    return c;
}

inline EpisodeConfig push_pull_config(std::uint64_t seed = 0) {
    EpisodeConfig c = walk_config(seed);
    c.num_distractors = 2;
    c.verb_set = {Verb::kPush, Verb::kPull};
    c.grammar_kind = GrammarKind::kSimpleTrans;
    return c;
}

// Mixed-verb configuration with obstacles, used to exercise every action.
inline EpisodeConfig busy_config(Rng& rng) {
    EpisodeConfig c;
    c.grid_size = uniform_int(rng, 4, 7);
    c.num_distractors = uniform_int(rng, 0, 3);
    c.num_obstacles = uniform_int(rng, 0, 3);
    c.other_objects_sample_percentage = 0.3 * uniform_unit(rng);
    c.weight_mode = bernoulli(rng, 0.5) ? WeightMode::kTiedToSize : WeightMode::kIndependent;
    c.episode_len = 30;
    c.verb_set = {Verb::kPush, Verb::kPull, Verb::kPickup};
    c.grammar_kind = GrammarKind::kSimpleTrans;
    c.max_count = 2;
    return c;
}

inline Action random_action(Rng& rng) {
    return kAllActions[uniform_index(rng, kNumActions)];
}

inline std::vector<std::pair<int, int>> random_pairs(Rng& rng, int nc, int nm, int n) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i) {
        out.emplace_back(uniform_int(rng, 0, nc - 1), uniform_int(rng, 0, nm - 1));
    }
    return out;
}

inline std::size_t count_objects(const GridState& s) {
    return s.objects_on_grid() + (s.agent.carried ? 1 : 0);
}

}  // namespace testing_support
