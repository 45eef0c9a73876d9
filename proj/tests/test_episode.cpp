#include <gtest/gtest.h>

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "gridcomm/episode.hpp"
#include "gridcomm/error.hpp"
#include "support.hpp"

using namespace gridcomm;
using testing_support::push_pull_config;
using testing_support::walk_config;

namespace {

// Tries every action sequence up to `depth`; true if any earns reward 1.
bool brute_force_solvable(const GridState& s, const TaskSpec& task, int depth, int max_steps) {
    if (depth == 0) return false;
    for (Action a : kAllActions) {
        const Transition t = apply_action(s, task, a, max_steps);
        if (t.outcome.reward == 1.0) return true;
        if (!t.outcome.done && brute_force_solvable(t.state, task, depth - 1, max_steps)) return true;
    }
    return false;
}

// Plain breadth-first search keyed on the full state (exact move counts
// included), used as the reference for plan lengths.
std::string full_key(const GridState& s) {
    std::ostringstream k;
    k << s.agent.position.col << ',' << s.agent.position.row << ',' << static_cast<int>(s.agent.heading) << ','
      << (s.agent.carried ? s.agent.carried->id : -1) << '|';
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        if (const auto* o = std::get_if<ObjectSpec>(&s.cells[i])) k << i << ':' << o->id << ';';
    }
    k << '|';
    for (const auto& [id, n] : s.push_progress) k << id << ':' << n << ';';
    k << (s.last_action ? static_cast<int>(*s.last_action) : -1) << '|';
    for (const auto& t : s.tracks) k << t.id << ':' << t.push_moves << ':' << t.pull_moves << ':' << t.picked_up << ';';
    return k.str();
}

std::optional<int> reference_plan_length(const GridState& start, const TaskSpec& task, int max_steps) {
    std::set<std::string> seen{full_key(start)};
    std::deque<GridState> frontier{start};
    while (!frontier.empty()) {
        GridState s = std::move(frontier.front());
        frontier.pop_front();
        for (Action a : kAllActions) {
            Transition t = apply_action(s, task, a, max_steps);
            if (t.outcome.reward == 1.0) return t.state.step_count;
            if (t.outcome.done || !seen.insert(full_key(t.state)).second) continue;
            frontier.push_back(std::move(t.state));
        }
    }
    return std::nullopt;
}

double replay(const GridState& s, const TaskSpec& task, const std::vector<Action>& plan, int max_steps) {
    GridState cur = s;
    double total = 0.0;
    for (Action a : plan) total += apply_action_in_place(cur, task, a, max_steps).reward;
    return total;
}

}  // namespace

TEST(SampleEpisode, DeterministicUnderSeed) {
    EpisodeConfig cfg = walk_config(7);
    Rng a(7), b(7);
    EXPECT_EQ(sample_episode(cfg, a), sample_episode(cfg, b));
}

TEST(SampleEpisode, DistractorsShareShapeOrColor) {
    Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const Episode ep = sample_episode(walk_config(), rng);
        const ObjectSpec& t = ep.target();
        int distractors = 0;
        for (const auto& cell : ep.state.cells) {
            const auto* o = std::get_if<ObjectSpec>(&cell);
            if (o == nullptr || o->id == t.id) continue;
            ++distractors;
            EXPECT_TRUE(o->shape == t.shape || o->color == t.color);
            EXPECT_FALSE(same_visible_attributes(*o, t));
        }
        EXPECT_EQ(distractors, 4);
        EXPECT_NE(ep.state.agent.position, *ep.state.find_object(t.id));
        EXPECT_FALSE(task_success(ep.state, ep.task));
    }
}

TEST(SampleEpisode, OtherObjectsDifferInShapeAndColor) {
    EpisodeConfig cfg = walk_config();
    cfg.grid_size = 6;
    cfg.num_distractors = 1;
    cfg.other_objects_sample_percentage = 0.5;
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Episode ep = sample_episode(cfg, rng);
        const ObjectSpec& t = ep.target();
        // 36 cells: target + 1 distractor + agent leave 33 spare -> 16 others.
        EXPECT_EQ(ep.state.objects_on_grid(), 18u);
        for (const auto& cell : ep.state.cells) {
            const auto* o = std::get_if<ObjectSpec>(&cell);
            if (o == nullptr || o->id <= 1) continue;
            EXPECT_NE(o->shape, t.shape);
            EXPECT_NE(o->color, t.color);
        }
    }
}

TEST(SampleEpisode, TiedWeights) {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Episode ep = sample_episode(push_pull_config(), rng);
        for (const auto& cell : ep.state.cells) {
            if (const auto* o = std::get_if<ObjectSpec>(&cell)) {
                EXPECT_EQ(o->weight, o->size <= 2 ? Weight::kLight : Weight::kHeavy);
            }
        }
    }
    EXPECT_EQ(weight_for_size(1), Weight::kLight);
    EXPECT_EQ(weight_for_size(4), Weight::kHeavy);
}

TEST(SampleEpisode, InstructionAndConceptAgreeWithTask) {
    Rng rng(8);
    EpisodeConfig cfg = push_pull_config();
    cfg.max_count = 3;
    for (int i = 0; i < 200; ++i) {
        const Episode ep = sample_episode(cfg, rng);
        const ParsedInstruction p = parse_instruction(ep.instruction);
        EXPECT_EQ(p.verb, ep.task.verb);
        EXPECT_EQ(p.count, ep.task.count);
        EXPECT_EQ(p.noun, ep.target().shape);
        const ConceptFields f = ep.concept_vector.decode();
        EXPECT_EQ(f.verb, ep.task.verb);
        EXPECT_EQ(f.shape, ep.target().shape);
        EXPECT_LE(ep.task.count, 3);
    }
}

TEST(SampleEpisode, EveryEpisodeIsSolvedByOracle) {
    Rng rng(2024);
    for (const EpisodeConfig& cfg : {walk_config(), push_pull_config()}) {
        for (int i = 0; i < 200; ++i) {
            const Episode ep = sample_episode(cfg, rng);
            const auto plan = oracle_solve(ep.state, ep.task, cfg.episode_len);
            EXPECT_LE(static_cast<int>(plan.size()), cfg.episode_len);
            EXPECT_EQ(replay(ep.state, ep.task, plan, cfg.episode_len), 1.0);
        }
    }
}

TEST(SampleEpisode, MazeEpisodesReplay) {
    EpisodeConfig cfg = walk_config();
    cfg.grid_size = 6;
    cfg.num_distractors = 2;
    cfg.enable_maze = true;
    cfg.maze_density = 0.6;
    cfg.maze_complexity = 0.6;
    cfg.episode_len = 30;
    Rng rng(17);
    for (int i = 0; i < 50; ++i) {
        const Episode ep = sample_episode(cfg, rng);
        const auto plan = oracle_solve(ep.state, ep.task, cfg.episode_len);
        EXPECT_EQ(replay(ep.state, ep.task, plan, cfg.episode_len), 1.0);
    }
}

TEST(SampleEpisode, ImpossibleBudgetRaisesUnsolvable) {
    EpisodeConfig cfg = push_pull_config();
    cfg.episode_len = 1;  // the agent never starts on the object, so two actions are needed
    Rng rng(0);
    EXPECT_THROW(sample_episode(cfg, rng), UnsolvableError);
}

TEST(Validate, RejectsBadConfigs) {
    EpisodeConfig cfg = walk_config();
    cfg.num_distractors = 15;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = walk_config();
    cfg.verb_set = {Verb::kPush};
    EXPECT_THROW(validate(cfg), ConfigError);  // intransitive grammar has no push
    cfg = walk_config();
    cfg.verb_set = {Verb::kDrop};
    cfg.grammar_kind = GrammarKind::kSimpleTrans;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = walk_config();
    cfg.maze_density = 1.5;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg = walk_config();
    cfg.max_count = 5;
    EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(GenerateMaze, NothingRequested) {
    Rng rng(1);
    EXPECT_TRUE(generate_maze(walk_config(), rng).empty());
}

TEST(GenerateMaze, ExactObstacleCount) {
    EpisodeConfig cfg = walk_config();
    cfg.num_obstacles = 3;
    Rng rng(4);
    const auto cells = generate_maze(cfg, rng);
    EXPECT_EQ(cells.size(), 3u);
    EXPECT_EQ(std::set<Position>(cells.begin(), cells.end()).size(), 3u);
}

TEST(GenerateMaze, DensityIncreasesWalls) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EpisodeConfig cfg = walk_config();
        cfg.grid_size = 12;
        cfg.enable_maze = true;
        cfg.maze_complexity = 0.05;  // short walks, so the lattice never saturates
        cfg.maze_density = 1.0;
        Rng a(seed);
        const auto dense = generate_maze(cfg, a);
        cfg.maze_density = 0.05;
        Rng b(seed);
        const auto sparse = generate_maze(cfg, b);
        EXPECT_GT(dense.size(), sparse.size()) << "seed " << seed;
    }
}

TEST(GenerateMaze, TooManyObstacles) {
    EpisodeConfig cfg = walk_config();
    cfg.num_obstacles = 15;
    Rng rng(0);
    EXPECT_THROW(generate_maze(cfg, rng), ConfigError);
}

TEST(Solvability, ForwardAdjacentTargetOneStep) {
    GridState s(4, 4);
    s.agent.position = {0, 0};
    s.agent.heading = Heading::kEast;
    s.add_object({1, 0}, {0, Shape::kSquare, Color::kRed, 1, Weight::kLight});
    EXPECT_TRUE(is_solvable(s, {Verb::kWalk, 1, 0}, 1));
    EXPECT_EQ(oracle_solve(s, {Verb::kWalk, 1, 0}, 1), std::vector<Action>{Action::kForward});
}

TEST(Solvability, EnclosedTarget) {
    GridState s(4, 4);
    s.agent.position = {3, 3};
    s.add_object({0, 0}, {0, Shape::kSquare, Color::kRed, 1, Weight::kLight});
    s.add_obstacle({1, 0});
    s.add_obstacle({0, 1});
    EXPECT_FALSE(is_solvable(s, {Verb::kWalk, 1, 0}, 50));
    EXPECT_THROW(oracle_solve(s, {Verb::kWalk, 1, 0}, 50), UnsolvableError);
}

TEST(Solvability, PickupOnTarget) {
    GridState s(3, 3);
    s.agent.position = {1, 1};
    s.add_object({1, 1}, {0, Shape::kSquare, Color::kRed, 3, Weight::kHeavy});
    EXPECT_EQ(oracle_solve(s, {Verb::kPickup, 1, 0}, 5), std::vector<Action>{Action::kPickup});
}

// Heavy push with the target one step ahead: the budget needed is path + 2.
TEST(Solvability, HeavyPushMatchesExhaustiveSearch) {
    GridState s(3, 3);
    s.agent.position = {0, 1};
    s.agent.heading = Heading::kEast;
    s.add_object({1, 1}, {0, Shape::kCircle, Color::kBlue, 4, Weight::kHeavy});
    const TaskSpec task{Verb::kPush, 1, 0};
    for (int budget = 1; budget <= 4; ++budget) {
        const bool brute = brute_force_solvable(s, task, budget, budget);
        EXPECT_EQ(is_solvable(s, task, budget), brute) << "budget " << budget;
        EXPECT_EQ(brute, budget >= 3) << "budget " << budget;
    }
    EXPECT_EQ(oracle_solve(s, task, 10).size(), 3u);
}

TEST(Solvability, AgreesWithBruteForceOnRandomSmallGrids) {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        GridState s(3, 3);
        std::vector<Position> cells;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) cells.push_back({c, r});
        }
        shuffle(cells, rng);
        const Weight w = bernoulli(rng, 0.5) ? Weight::kHeavy : Weight::kLight;
        s.add_object(cells[0], {0, Shape::kSquare, Color::kRed, w == Weight::kHeavy ? 3 : 1, w});
        if (bernoulli(rng, 0.5)) s.add_obstacle(cells[1]);
        s.agent.position = cells[2];
        s.agent.heading = kAllHeadings[uniform_index(rng, 4)];
        const Verb verbs[] = {Verb::kWalk, Verb::kPush, Verb::kPull, Verb::kPickup};
        const TaskSpec task{verbs[uniform_index(rng, 4)], 1, 0};
        const int budget = 4;
        EXPECT_EQ(is_solvable(s, task, budget), brute_force_solvable(s, task, budget, budget))
            << "trial " << trial;
    }
}

TEST(Solvability, ShortestPlansMatchReferenceSearch) {
    Rng rng(78);
    int solvable = 0, unsolvable = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const int n = uniform_int(rng, 4, 5);
        GridState s(n, n);
        std::vector<Position> cells;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) cells.push_back({c, r});
        }
        shuffle(cells, rng);
        const int objects = uniform_int(rng, 1, 4);
        const int obstacles = uniform_int(rng, 0, 4);
        std::size_t next = 0;
        for (int id = 0; id < objects; ++id) {
            const Weight w = bernoulli(rng, 0.5) ? Weight::kHeavy : Weight::kLight;
            s.add_object(cells[next++], {id, kAllShapes[uniform_index(rng, 4)], Color::kRed,
                                         w == Weight::kHeavy ? 4 : 1, w});
        }
        for (int i = 0; i < obstacles; ++i) s.add_obstacle(cells[next++]);
        s.agent.position = bernoulli(rng, 0.3) ? cells[0] : cells[next];
        s.agent.heading = kAllHeadings[uniform_index(rng, 4)];
        const Verb verbs[] = {Verb::kWalk, Verb::kPush, Verb::kPull, Verb::kPickup};
        const Verb verb = verbs[uniform_index(rng, 4)];
        const int count = verb == Verb::kPush || verb == Verb::kPull ? uniform_int(rng, 1, 2) : 1;
        const TaskSpec task{verb, count, 0};
        const int budget = uniform_int(rng, 4, 9);

        const auto reference = reference_plan_length(s, task, budget);
        ASSERT_EQ(is_solvable(s, task, budget), reference.has_value()) << "trial " << trial;
        if (reference) {
            const auto plan = oracle_solve(s, task, budget);
            EXPECT_EQ(static_cast<int>(plan.size()), *reference) << "trial " << trial;
            EXPECT_EQ(replay(s, task, plan, budget), 1.0) << "trial " << trial;
            ++solvable;
        } else {
            EXPECT_THROW(oracle_solve(s, task, budget), UnsolvableError);
            ++unsolvable;
        }
    }
    EXPECT_GT(solvable, 30);
    EXPECT_GT(unsolvable, 10);
}
