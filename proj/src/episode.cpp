#include "gridcomm/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "gridcomm/error.hpp"

namespace gridcomm {

std::string_view to_string(WeightMode m) {
    return m == WeightMode::kTiedToSize ? "tied_to_size" : "independent";
}

std::optional<WeightMode> weight_mode_from_string(std::string_view s) {
    if (s == "tied_to_size") return WeightMode::kTiedToSize;
    if (s == "independent") return WeightMode::kIndependent;
    return std::nullopt;
}

namespace {

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate(const EpisodeConfig& c) {
    if (c.grid_size < 1) throw ConfigError("grid_size must be positive");
    if (c.num_distractors < 0) throw ConfigError("distractors must be non-negative");
    if (c.num_obstacles < 0) throw ConfigError("num_obstacles must be non-negative");
    if (c.episode_len < 1) throw ConfigError("episode_len must be positive");
    if (!unit_interval(c.other_objects_sample_percentage)) {
        throw ConfigError("other_objects_sample_percentage must lie in [0,1]");
    }
    if (!unit_interval(c.maze_density) || !unit_interval(c.maze_complexity)) {
        throw ConfigError("maze density and complexity must lie in [0,1]");
    }
    if (!unit_interval(c.lights_out_prob)) throw ConfigError("lights_out must lie in [0,1]");
    if (c.max_count < 1 || c.max_count > kMaxCount) {
        throw ConfigError("max_count must be between 1 and " + std::to_string(kMaxCount));
    }
    if (c.verb_set.empty()) throw ConfigError("verb set is empty");
    for (Verb v : c.verb_set) {
        if (!grammar_accepts(c.grammar_kind, v)) {
            throw ConfigError("verb '" + std::string(to_string(v)) + "' is not generated by " +
                              std::string(to_string(c.grammar_kind)));
        }
    }
    const long long cells = static_cast<long long>(c.grid_size) * c.grid_size;
    const long long entities =
        1LL + c.num_distractors + 1 + (c.enable_maze ? 0 : c.num_obstacles);
    if (entities > cells) {
        throw ConfigError("config infeasible: " + std::to_string(entities) +
                          " entities do not fit in " + std::to_string(cells) + " cells");
    }
}

const ObjectSpec& Episode::target() const {
    const ObjectSpec* spec = state.find_spec(task.target_id);
    if (spec == nullptr) throw ContractError("episode target missing");
    return *spec;
}

namespace {

bool row_major_less(Position a, Position b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

std::vector<Position> maze_walls(int size, double density, double complexity, Rng& rng) {
    const int nodes_per_axis = (size + 1) / 2;  // even coordinates
    const int islands = static_cast<int>(std::floor(density * nodes_per_axis * nodes_per_axis));
    const int steps = static_cast<int>(std::floor(complexity * 5.0 * (size + size)));

    std::vector<char> wall(static_cast<std::size_t>(size * size), 0);
    auto cell = [&](int c, int r) -> char& { return wall[static_cast<std::size_t>(r * size + c)]; };

    for (int i = 0; i < islands; ++i) {
        int col = 2 * static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(nodes_per_axis)));
        int row = 2 * static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(nodes_per_axis)));
        cell(col, row) = 1;
        for (int j = 0; j < steps; ++j) {
            std::vector<Position> next;
            if (col > 1) next.push_back({col - 2, row});
            if (col < size - 2) next.push_back({col + 2, row});
            if (row > 1) next.push_back({col, row - 2});
            if (row < size - 2) next.push_back({col, row + 2});
            if (next.empty()) break;
            const Position n = next[uniform_index(rng, next.size())];
            if (cell(n.col, n.row) == 0) {
                cell(n.col, n.row) = 1;
                cell((n.col + col) / 2, (n.row + row) / 2) = 1;
                col = n.col;
                row = n.row;
            }
        }
    }

    std::vector<Position> out;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            if (cell(c, r) != 0) out.push_back({c, r});
        }
    }
    return out;
}

}  // namespace

std::vector<Position> generate_maze(const EpisodeConfig& config, Rng& rng) {
    const int n = config.grid_size;
    const int cells = n * n;
    std::vector<Position> out;
    if (config.enable_maze) {
        out = maze_walls(n, config.maze_density, config.maze_complexity, rng);
    } else if (config.num_obstacles > 0) {
        if (config.num_obstacles > cells - 2) {
            throw ConfigError("too many obstacles: fewer than 2 free cells would remain");
        }
        std::vector<Position> all;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) all.push_back({c, r});
        }
        shuffle(all, rng);
        out.assign(all.begin(), all.begin() + config.num_obstacles);
        std::sort(out.begin(), out.end(), row_major_less);
    }
    if (cells - static_cast<int>(out.size()) < 2) {
        throw ConfigError("obstacle density leaves fewer than 2 free cells");
    }
    return out;
}

namespace {

ObjectSpec random_object(Rng& rng, int id) {
    ObjectSpec o;
    o.id = id;
    o.shape = kAllShapes[uniform_index(rng, kNumShapes)];
    o.color = kAllColors[uniform_index(rng, kNumColors)];
    o.size = uniform_int(rng, 1, kNumSizes);
    return o;
}

void assign_weight(ObjectSpec& o, WeightMode mode, Rng& rng) {
    o.weight = mode == WeightMode::kTiedToSize ? weight_for_size(o.size)
                                               : kAllWeights[uniform_index(rng, kNumWeights)];
}

// Shares shape or color with the target but differs in a visible attribute.
ObjectSpec random_distractor(const ObjectSpec& target, Rng& rng, int id) {
    for (;;) {
        ObjectSpec o = random_object(rng, id);
        const bool related = o.shape == target.shape || o.color == target.color;
        if (related && !same_visible_attributes(o, target)) return o;
    }
}

// Distinct from the target in both shape and color.
ObjectSpec random_other(const ObjectSpec& target, Rng& rng, int id) {
    for (;;) {
        ObjectSpec o = random_object(rng, id);
        if (o.shape != target.shape && o.color != target.color) return o;
    }
}

std::optional<Episode> try_sample(const EpisodeConfig& config, Rng& rng, const Lexicon& lexicon) {
    const Verb verb = config.verb_set[uniform_index(rng, config.verb_set.size())];
    const bool takes_count = verb == Verb::kPush || verb == Verb::kPull;
    const int count = takes_count ? uniform_int(rng, 1, config.max_count) : 1;

    GridState state(config.grid_size, config.grid_size);
    const bool has_obstacles = config.enable_maze || config.num_obstacles > 0;
    if (has_obstacles) {
        for (Position p : generate_maze(config, rng)) state.add_obstacle(p);
    }

    std::vector<Position> free;
    for (int r = 0; r < state.height; ++r) {
        for (int c = 0; c < state.width; ++c) {
            if (std::holds_alternative<EmptyCell>(state.at({c, r}))) free.push_back({c, r});
        }
    }
    shuffle(free, rng);
    const std::size_t needed = static_cast<std::size_t>(config.num_distractors) + 2;
    if (free.size() < needed) return std::nullopt;

    std::size_t next = 0;
    int next_id = 0;
    ObjectSpec target = random_object(rng, next_id++);
    assign_weight(target, config.weight_mode, rng);
    state.add_object(free[next++], target);

    for (int i = 0; i < config.num_distractors; ++i) {
        ObjectSpec d = random_distractor(target, rng, next_id++);
        assign_weight(d, config.weight_mode, rng);
        state.add_object(free[next++], d);
    }

    const std::size_t spare = free.size() - next - 1;  // one cell kept for the agent
    const auto others = static_cast<std::size_t>(
        std::floor(config.other_objects_sample_percentage * static_cast<double>(spare)));
    for (std::size_t i = 0; i < others; ++i) {
        ObjectSpec o = random_other(target, rng, next_id++);
        assign_weight(o, config.weight_mode, rng);
        state.add_object(free[next++], o);
    }

    state.agent.position = free[next++];
    state.agent.heading = kAllHeadings[uniform_index(rng, kNumHeadings)];

    const TaskSpec task{verb, count, target.id};
    if (!is_solvable(state, task, config.episode_len)) return std::nullopt;

    Episode ep;
    ep.state = std::move(state);
    ep.task = task;
    ep.instruction = generate_instruction(task, target, config.grammar_kind, rng, lexicon);
    ep.concept_vector = encode_concept(parse_instruction(ep.instruction, lexicon), target);
    ep.lights_out_active = bernoulli(rng, config.lights_out_prob);
    return ep;
}

}  // namespace

Episode sample_episode(const EpisodeConfig& config, Rng& rng, const Lexicon& lexicon) {
    validate(config);
    for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
        if (auto ep = try_sample(config, rng, lexicon)) return std::move(*ep);
    }
    throw UnsolvableError("no solvable episode after " + std::to_string(kMaxSampleAttempts) +
                          " consecutive samples");
}

// ---------------------------------------------------------------------------
// Shortest-plan search over the deterministic transition graph.

namespace {

// Compact, decodable snapshot of everything that can influence future
// transitions or task success. Search nodes keep only this string; full
// states are rebuilt from it on expansion.
class StateCodec {
public:
    StateCodec(const GridState& root, int target_id) : blank_(root), target_id_(target_id) {
        for (auto& cell : blank_.cells) {
            if (const auto* obj = std::get_if<ObjectSpec>(&cell)) {
                specs_[obj->id] = *obj;
                cell = EmptyCell{};
            }
        }
        if (root.agent.carried) specs_[root.agent.carried->id] = *root.agent.carried;
        blank_.agent.carried.reset();
        blank_.push_progress.clear();
        blank_.last_action.reset();
        blank_.finished = false;
    }

    std::string encode(const GridState& s) const {
        std::string key;
        key.reserve(48);
        put(key, s.agent.position.col);
        put(key, s.agent.position.row);
        put(key, static_cast<int>(s.agent.heading));
        put(key, s.agent.carried ? s.agent.carried->id : kNone);
        for (std::size_t i = 0; i < s.cells.size(); ++i) {
            if (const auto* obj = std::get_if<ObjectSpec>(&s.cells[i])) {
                put(key, static_cast<int>(i));
                put(key, obj->id);
            }
        }
        put(key, kNone);
        put(key, static_cast<int>(s.push_progress.size()));
        for (const auto& [id, progress] : s.push_progress) {
            put(key, id);
            put(key, progress);
        }
        put(key, !s.push_progress.empty() && s.last_action ? static_cast<int>(*s.last_action) : kNone);
        const ObjectTrack* t = s.track(target_id_);
        put(key, t ? (t->push_moves > 0 ? 1 : 0) | (t->pull_moves > 0 ? 2 : 0) | (t->picked_up ? 4 : 0) : 0);
        return key;
    }

    GridState decode(const std::string& key, int steps) const {
        GridState s = blank_;
        std::size_t at = 0;
        auto next = [&] {
            const int v = static_cast<unsigned char>(key[at]) | (static_cast<unsigned char>(key[at + 1]) << 8);
            at += 2;
            return v;
        };
        s.agent.position.col = next();
        s.agent.position.row = next();
        s.agent.heading = static_cast<Heading>(next());
        if (const int carried = next(); carried != kNone) s.agent.carried = specs_.at(carried);
        for (int cell = next(); cell != kNone; cell = next()) {
            s.cells[static_cast<std::size_t>(cell)] = specs_.at(next());
        }
        for (int n = next(); n > 0; --n) {
            const int id = next();
            s.push_progress[id] = next();
        }
        if (const int last = next(); last != kNone) s.last_action = static_cast<Action>(last);
        const int flags = next();
        if (ObjectTrack* t = s.track(target_id_)) {
            t->push_moves = flags & 1;
            t->pull_moves = (flags >> 1) & 1;
            t->picked_up = (flags & 4) != 0;
        }
        s.step_count = steps;
        return s;
    }

private:
    static constexpr int kNone = 0xFFFF;

    static void put(std::string& key, int v) {
        key.push_back(static_cast<char>(v & 0xFF));
        key.push_back(static_cast<char>((v >> 8) & 0xFF));
    }

    GridState blank_;
    int target_id_;
    std::map<int, ObjectSpec> specs_;
};

// Shortest path lengths between all cells, walking around the impassable
// ones. Walls and obstacles never move and the agent may share a cell with
// an object, so these distances hold for the whole search.
class StaticDistances {
public:
    static constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

    explicit StaticDistances(const GridState& s) : grid_(s), n_(s.cells.size()), dist_(n_ * n_, kUnreachable) {
        std::vector<std::size_t> queue;
        for (std::size_t from = 0; from < n_; ++from) {
            if (is_impassable(s.cells[from])) continue;
            int* row = &dist_[from * n_];
            row[from] = 0;
            queue.assign(1, from);
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const std::size_t cur = queue[head];
                const Position p{static_cast<int>(cur % static_cast<std::size_t>(s.width)),
                                 static_cast<int>(cur / static_cast<std::size_t>(s.width))};
                for (Heading h : kAllHeadings) {
                    const Position q = p + heading_offset(h);
                    if (!s.in_bounds(q)) continue;
                    const std::size_t qi = s.index(q);
                    if (row[qi] != kUnreachable || is_impassable(s.cells[qi])) continue;
                    row[qi] = row[cur] + 1;
                    queue.push_back(qi);
                }
            }
        }
    }

    int operator()(Position a, Position b) const {
        if (!grid_.in_bounds(a) || !grid_.in_bounds(b)) return kUnreachable;
        return dist_[grid_.index(a) * n_ + grid_.index(b)];
    }

private:
    const GridState& grid_;
    std::size_t n_;
    std::vector<int> dist_;
};

// Lower bound on the actions left before the task can succeed, or nullopt
// when it never can. Objects only move one cell per push or pull, from the
// agent's own cell, so distances bound the work from below.
std::optional<int> steps_needed(const GridState& s, const TaskSpec& task, const StaticDistances& dist) {
    const auto pos = s.find_object(task.target_id);
    const ObjectTrack* tr = s.track(task.target_id);
    const Position agent = s.agent.position;
    const int reach = pos ? dist(agent, *pos) : 0;
    if (reach >= StaticDistances::kUnreachable) return std::nullopt;
    switch (task.verb) {
        case Verb::kWalk:
            return pos ? reach : 1;
        case Verb::kPickup:
            return pos ? reach + 1 : 1;
        case Verb::kDrop:
            return pos ? reach + 2 : 1;
        case Verb::kPush:
        case Verb::kPull: {
            if (!pos || !tr || tr->picked_up) return std::nullopt;
            if ((task.verb == Verb::kPush ? tr->pull_moves : tr->push_moves) > 0) return std::nullopt;
            const ObjectSpec* spec = s.find_spec(task.target_id);
            const int per_move = spec && spec->weight == Weight::kHeavy ? 2 : 1;
            int moves = StaticDistances::kUnreachable;
            for (Heading h : kAllHeadings) {
                const Offset d = heading_offset(h);
                const Position goal{tr->start.col + d.dcol * task.count, tr->start.row + d.drow * task.count};
                moves = std::min(moves, dist(*pos, goal));
            }
            if (moves >= StaticDistances::kUnreachable) return std::nullopt;
            const int primed = s.push_progress.count(task.target_id) ? 1 : 0;
            return reach + std::max(moves, 1) * per_move - primed;
        }
    }
    return std::nullopt;
}

struct OpenEntry {
    int f;
    int g;
    int node;

    // Smallest f first; among equals the deeper node, then the older one.
    bool operator<(const OpenEntry& o) const {
        if (f != o.f) return f > o.f;
        if (g != o.g) return g < o.g;
        return node > o.node;
    }
};

struct SearchNode {
    int parent;
    Action action;
    const std::string* key;  // null for goal nodes
};

// A* with steps_needed as heuristic. The bound drops by at most one per
// action, so it is consistent and the first goal popped is a shortest plan.
std::optional<std::vector<Action>> shortest_solution(const GridState& start, const TaskSpec& task,
                                                     int max_steps) {
    if (max_steps <= 0) return std::nullopt;
    GridState root = start;
    root.step_count = 0;
    root.finished = false;
    const StaticDistances dist(root);
    const auto h0 = steps_needed(root, task, dist);
    if (!h0 || *h0 > max_steps) return std::nullopt;

    const StateCodec codec(root, task.target_id);
    std::vector<SearchNode> nodes;
    std::unordered_map<std::string, int> best_g;
    std::priority_queue<OpenEntry> open;
    const auto root_it = best_g.emplace(codec.encode(root), 0).first;
    nodes.push_back({-1, Action::kLeft, &root_it->first});
    open.push({*h0, 0, 0});

    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        const SearchNode node = nodes[static_cast<std::size_t>(top.node)];
        if (node.key == nullptr) {
            std::vector<Action> path;
            for (int i = top.node; nodes[static_cast<std::size_t>(i)].parent >= 0;
                 i = nodes[static_cast<std::size_t>(i)].parent) {
                path.push_back(nodes[static_cast<std::size_t>(i)].action);
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (top.g > best_g.at(*node.key)) continue;  // superseded by a shorter route
        const GridState state = codec.decode(*node.key, top.g);
        for (Action a : kAllActions) {
            GridState child = state;
            const StepOutcome out = apply_action_in_place(child, task, a, max_steps);
            const int g = top.g + 1;
            if (out.reward == 1.0) {
                nodes.push_back({top.node, a, nullptr});
                open.push({g, g, static_cast<int>(nodes.size() - 1)});
                continue;
            }
            if (out.done) continue;
            const auto bound = steps_needed(child, task, dist);
            if (!bound || g + *bound > max_steps) continue;
            auto [it, fresh] = best_g.try_emplace(codec.encode(child), g);
            if (!fresh) {
                if (it->second <= g) continue;
                it->second = g;
            }
            if (nodes.size() >= kMaxSearchNodes) {
                throw UnsolvableError("search exceeded " + std::to_string(kMaxSearchNodes) + " states");
            }
            nodes.push_back({top.node, a, &it->first});
            open.push({g + *bound, g, static_cast<int>(nodes.size() - 1)});
        }
    }
    return std::nullopt;
}

}  // namespace

bool is_solvable(const GridState& state, const TaskSpec& task, int max_steps) {
    try {
        return shortest_solution(state, task, max_steps).has_value();
    } catch (const UnsolvableError&) {
        return false;
    }
}

std::vector<Action> oracle_solve(const GridState& state, const TaskSpec& task, int max_steps) {
    auto path = shortest_solution(state, task, max_steps);
    if (!path) {
        throw UnsolvableError("task cannot be solved within " + std::to_string(max_steps) +
                              " steps");
    }
    return std::move(*path);
}

}  // namespace gridcomm
