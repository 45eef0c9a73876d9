#include "gridcomm/world.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "gridcomm/error.hpp"

namespace gridcomm {

GridState::GridState(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw ContractError("grid dimensions must be positive");
    cells.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), EmptyCell{});
}

const CellContent& GridState::at(Position p) const {
    if (!in_bounds(p)) {
        throw ContractError("cell (" + std::to_string(p.col) + "," + std::to_string(p.row) +
                            ") is outside the grid");
    }
    return cells[index(p)];
}

CellContent& GridState::at(Position p) {
    return const_cast<CellContent&>(std::as_const(*this).at(p));
}

const ObjectSpec* GridState::object_at(Position p) const {
    return std::get_if<ObjectSpec>(&at(p));
}

std::optional<Position> GridState::find_object(int id) const {
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const auto* obj = std::get_if<ObjectSpec>(&cells[index({c, r})]);
            if (obj != nullptr && obj->id == id) return Position{c, r};
        }
    }
    return std::nullopt;
}

const ObjectSpec* GridState::find_spec(int id) const {
    if (agent.carried && agent.carried->id == id) return &*agent.carried;
    for (const auto& cell : cells) {
        const auto* obj = std::get_if<ObjectSpec>(&cell);
        if (obj != nullptr && obj->id == id) return obj;
    }
    return nullptr;
}

const ObjectTrack* GridState::track(int id) const {
    auto it = std::find_if(tracks.begin(), tracks.end(),
                           [id](const ObjectTrack& t) { return t.id == id; });
    return it == tracks.end() ? nullptr : &*it;
}

ObjectTrack* GridState::track(int id) {
    return const_cast<ObjectTrack*>(std::as_const(*this).track(id));
}

void GridState::add_object(Position p, const ObjectSpec& spec) {
    if (!std::holds_alternative<EmptyCell>(at(p))) {
        throw ContractError("cannot place object on an occupied cell");
    }
    if (track(spec.id) != nullptr) {
        throw ContractError("duplicate object id " + std::to_string(spec.id));
    }
    if (spec.size < 1 || spec.size > kNumSizes) throw ContractError("object size must be 1..4");
    at(p) = spec;
    tracks.push_back(ObjectTrack{spec.id, p, 0, 0, false});
}

void GridState::add_obstacle(Position p) {
    if (!std::holds_alternative<EmptyCell>(at(p))) {
        throw ContractError("cannot place obstacle on an occupied cell");
    }
    at(p) = ObstacleCell{};
}

void GridState::add_wall(Position p) {
    if (!std::holds_alternative<EmptyCell>(at(p))) {
        throw ContractError("cannot place wall on an occupied cell");
    }
    at(p) = WallCell{};
}

std::size_t GridState::objects_on_grid() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) {
        return std::holds_alternative<ObjectSpec>(c);
    }));
}

std::optional<std::string> find_invariant_violation(const GridState& state) {
    if (state.cells.size() != static_cast<std::size_t>(state.width * state.height)) {
        return "cell array does not match grid dimensions";
    }
    if (!state.in_bounds(state.agent.position)) return "agent outside the grid";
    if (is_impassable(state.at(state.agent.position))) return "agent inside an impassable cell";

    std::set<int> ids;
    for (const auto& cell : state.cells) {
        if (const auto* obj = std::get_if<ObjectSpec>(&cell)) {
            if (!ids.insert(obj->id).second) return "object id appears twice on the grid";
        }
    }
    if (state.agent.carried && !ids.insert(state.agent.carried->id).second) {
        return "carried object is also present in a cell";
    }
    if (ids.size() != state.tracks.size()) return "object count differs from the episode start";
    for (const auto& t : state.tracks) {
        if (ids.count(t.id) == 0) return "object " + std::to_string(t.id) + " vanished";
    }
    for (const auto& [id, progress] : state.push_progress) {
        if (progress != 0 && progress != 1) return "push progress outside {0,1}";
        if (ids.count(id) == 0) return "push progress for unknown object";
    }
    return std::nullopt;
}

namespace {

void check_task(const GridState& state, const TaskSpec& task) {
    if (task.count < 1) throw ContractError("task count must be positive");
    if (static_cast<int>(task.verb) > static_cast<int>(Verb::kDrop)) {
        throw ContractError("unknown task verb");
    }
    if (state.find_spec(task.target_id) == nullptr) {
        throw ContractError("task target " + std::to_string(task.target_id) +
                            " is not in the episode");
    }
}

bool straight_displacement(Position from, Position to, int cells) {
    const int dc = to.col - from.col;
    const int dr = to.row - from.row;
    if (dc != 0 && dr != 0) return false;
    return std::abs(dc) + std::abs(dr) == cells;
}

// Returns the id of the displaced object, or nullopt when blocked.
std::optional<int> displace(GridState& s, Position from, Offset dir) {
    const Position to = from + dir;
    if (!s.in_bounds(to) || !std::holds_alternative<EmptyCell>(s.at(to))) return std::nullopt;
    const int id = std::get<ObjectSpec>(s.at(from)).id;
    s.at(to) = s.at(from);
    s.at(from) = EmptyCell{};
    return id;
}

}  // namespace

bool task_success(const GridState& state, const TaskSpec& task) {
    check_task(state, task);
    const auto pos = state.find_object(task.target_id);
    const ObjectTrack* tr = state.track(task.target_id);
    switch (task.verb) {
        case Verb::kWalk:
            return pos && *pos == state.agent.position;
        case Verb::kPush:
            return pos && tr && !tr->picked_up && tr->pull_moves == 0 &&
                   straight_displacement(tr->start, *pos, task.count);
        case Verb::kPull:
            return pos && tr && !tr->picked_up && tr->push_moves == 0 &&
                   straight_displacement(tr->start, *pos, task.count);
        case Verb::kPickup:
            return state.agent.carried && state.agent.carried->id == task.target_id;
        case Verb::kDrop:
            return pos && tr && tr->picked_up;
    }
    return false;
}

StepOutcome apply_action_in_place(GridState& s, const TaskSpec& task, Action action,
                                  int max_steps) {
    if (static_cast<int>(action) >= kNumActions) {
        throw ContractError("unknown action id " + std::to_string(static_cast<int>(action)));
    }
    if (s.finished) throw ContractError("episode already finished");
    if (max_steps <= 0 || s.step_count >= max_steps) {
        throw ContractError("step budget exhausted");
    }
    check_task(s, task);

    StepOutcome out;
    bool keep_progress = false;
    AgentPose& agent = s.agent;

    switch (action) {
        case Action::kLeft:
            agent.heading = turn_left(agent.heading);
            break;
        case Action::kRight:
            agent.heading = turn_right(agent.heading);
            break;
        case Action::kForward:
        case Action::kBackward: {
            Offset dir = heading_offset(agent.heading);
            if (action == Action::kBackward) dir = reversed(dir);
            const Position to = agent.position + dir;
            if (!s.in_bounds(to) || is_impassable(s.at(to))) {
                out.info["blocked"] = 1;
            } else {
                agent.position = to;
            }
            break;
        }
        case Action::kPush:
        case Action::kPull: {
            const ObjectSpec* obj = s.object_at(agent.position);
            Offset dir = heading_offset(agent.heading);
            if (action == Action::kPull) dir = reversed(dir);
            const Position dest = agent.position + dir;
            if (obj == nullptr || !s.in_bounds(dest) ||
                !std::holds_alternative<EmptyCell>(s.at(dest))) {
                out.info["blocked"] = 1;
                break;
            }
            const int id = obj->id;
            if (obj->weight == Weight::kHeavy) {
                const auto it = s.push_progress.find(id);
                const bool primed = it != s.push_progress.end() && s.last_action == action;
                if (!primed) {
                    s.push_progress.clear();
                    s.push_progress[id] = 1;
                    keep_progress = true;
                    out.info["push_progress"] = 1;
                    break;
                }
            }
            displace(s, agent.position, dir);
            ObjectTrack* tr = s.track(id);
            if (tr != nullptr) {
                (action == Action::kPush ? tr->push_moves : tr->pull_moves) += 1;
            }
            out.info["moved_object"] = id;
            break;
        }
        case Action::kPickup: {
            const ObjectSpec* obj = s.object_at(agent.position);
            if (obj == nullptr || agent.carried) {
                out.info["blocked"] = 1;
                break;
            }
            agent.carried = *obj;
            s.at(agent.position) = EmptyCell{};
            if (ObjectTrack* tr = s.track(agent.carried->id)) tr->picked_up = true;
            out.info["picked_up"] = agent.carried->id;
            break;
        }
        case Action::kDrop: {
            if (!agent.carried || !std::holds_alternative<EmptyCell>(s.at(agent.position))) {
                out.info["blocked"] = 1;
                break;
            }
            s.at(agent.position) = *agent.carried;
            out.info["dropped"] = agent.carried->id;
            agent.carried.reset();
            break;
        }
    }

    if (!keep_progress) s.push_progress.clear();
    s.last_action = action;
    s.step_count += 1;

    if (task_success(s, task)) {
        out.reward = 1.0;
        out.done = true;
        out.info["success"] = 1;
    } else if (s.step_count >= max_steps) {
        out.done = true;
        out.info["timeout"] = 1;
    }
    s.finished = out.done;
    return out;
}

Transition apply_action(const GridState& state, const TaskSpec& task, Action action,
                        int max_steps) {
    Transition t{state, {}};
    t.outcome = apply_action_in_place(t.state, task, action, max_steps);
    return t;
}

CellBits cell_encoding(const GridState& state, int col, int row) {
    const Position p{col, row};
    const CellContent& cell = state.at(p);
    CellBits bits;
    if (is_impassable(cell)) {
        bits.set();
        return bits;
    }
    if (const auto* obj = std::get_if<ObjectSpec>(&cell)) {
        bits.set(cell_bit::kSize + obj->size - 1);
        bits.set(cell_bit::kShape + static_cast<int>(obj->shape));
        bits.set(cell_bit::kColor + static_cast<int>(obj->color));
    }
    if (state.agent.position == p) {
        bits.set(cell_bit::kAgent);
        bits.set(cell_bit::kHeading + static_cast<int>(state.agent.heading));
    }
    return bits;
}

GridEncoding grid_encoding(const GridState& state) {
    GridEncoding enc{state.width, state.height, {}};
    enc.cells.reserve(state.cells.size());
    for (int r = 0; r < state.height; ++r) {
        for (int c = 0; c < state.width; ++c) enc.cells.push_back(cell_encoding(state, c, r));
    }
    return enc;
}

namespace {

template <typename Enum>
std::optional<Enum> one_hot_group(const CellBits& bits, int base, int width) {
    for (int i = 0; i < width; ++i) {
        if (bits.test(static_cast<std::size_t>(base + i))) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

}  // namespace

DecodedCell decode_cell(const CellBits& bits) {
    DecodedCell d;
    if (bits.all()) {
        d.impassable = true;
        return d;
    }
    if (auto s = one_hot_group<int>(bits, cell_bit::kSize, kNumSizes)) d.size = *s + 1;
    d.shape = one_hot_group<Shape>(bits, cell_bit::kShape, kNumShapes);
    d.color = one_hot_group<Color>(bits, cell_bit::kColor, kNumColors);
    if (bits.test(cell_bit::kAgent)) {
        d.agent_heading = one_hot_group<Heading>(bits, cell_bit::kHeading, kNumHeadings);
    }
    return d;
}

}  // namespace gridcomm
