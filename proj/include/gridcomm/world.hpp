#pragma once

#include <bitset>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gridcomm/types.hpp"

namespace gridcomm {

struct EmptyCell {
    friend bool operator==(const EmptyCell&, const EmptyCell&) = default;
};
struct ObstacleCell {
    friend bool operator==(const ObstacleCell&, const ObstacleCell&) = default;
};
struct WallCell {
    friend bool operator==(const WallCell&, const WallCell&) = default;
};

/// At most one object per cell; obstacles and walls are impassable.
using CellContent = std::variant<EmptyCell, ObjectSpec, ObstacleCell, WallCell>;

inline bool is_impassable(const CellContent& c) {
    return std::holds_alternative<ObstacleCell>(c) || std::holds_alternative<WallCell>(c);
}

struct AgentPose {
    Position position;
    Heading heading = Heading::kEast;
    std::optional<ObjectSpec> carried;

    friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

/// Per-object history needed to judge push/pull/drop tasks.
struct ObjectTrack {
    int id = 0;
    Position start;  // position at episode start
    int push_moves = 0;
    int pull_moves = 0;
    bool picked_up = false;

    friend bool operator==(const ObjectTrack&, const ObjectTrack&) = default;
};

struct TaskSpec {
    Verb verb = Verb::kWalk;
    int count = 1;
    int target_id = 0;

    friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct StepOutcome {
    double reward = 0.0;
    bool done = false;
    /// Diagnostic flags: "blocked", "picked_up", "dropped", "moved_object",
    /// "push_progress", "success", "timeout". Values carry an object id or 1.
    std::map<std::string, int> info;
};

/// Full world state. Cells are stored row-major.
struct GridState {
    int width = 0;
    int height = 0;
    std::vector<CellContent> cells;
    AgentPose agent;
    /// Heavy objects with one pending push/pull (value always 1 when present).
    std::map<int, int> push_progress;
    std::optional<Action> last_action;
    std::vector<ObjectTrack> tracks;
    int step_count = 0;
    bool finished = false;

    GridState() = default;
    GridState(int w, int h);

    bool in_bounds(Position p) const {
        return p.col >= 0 && p.row >= 0 && p.col < width && p.row < height;
    }
    std::size_t index(Position p) const {
        return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(p.col);
    }

    /// Throws ContractError when p is outside the grid.
    const CellContent& at(Position p) const;
    CellContent& at(Position p);

    const ObjectSpec* object_at(Position p) const;
    std::optional<Position> find_object(int id) const;
    const ObjectSpec* find_spec(int id) const;  // searches cells and carry
    const ObjectTrack* track(int id) const;
    ObjectTrack* track(int id);

    /// Places an object on an empty cell and records its start position.
    void add_object(Position p, const ObjectSpec& spec);
    void add_obstacle(Position p);
    void add_wall(Position p);

    std::size_t objects_on_grid() const;

    friend bool operator==(const GridState&, const GridState&) = default;
};

/// Returns a description of the first broken state invariant, if any.
std::optional<std::string> find_invariant_violation(const GridState& state);

struct Transition {
    GridState state;
    StepOutcome outcome;
};

/// Pure transition function.
Transition apply_action(const GridState& state, const TaskSpec& task, Action action,
                        int max_steps);

/// Same as apply_action but mutates `state`.
StepOutcome apply_action_in_place(GridState& state, const TaskSpec& task, Action action,
                                  int max_steps);

bool task_success(const GridState& state, const TaskSpec& task);

// ---------------------------------------------------------------------------
// Listener-side observation encoding.

inline constexpr int kCellBits = 17;
using CellBits = std::bitset<kCellBits>;

namespace cell_bit {
inline constexpr int kSize = 0;     // 4 bits, size 1..4
inline constexpr int kShape = 4;    // square, cylinder, circle, diamond
inline constexpr int kColor = 8;    // red, blue, yellow, green
inline constexpr int kAgent = 12;
inline constexpr int kHeading = 13;  // E, S, W, N
}  // namespace cell_bit

CellBits cell_encoding(const GridState& state, int col, int row);

struct GridEncoding {
    int width = 0;
    int height = 0;
    std::vector<CellBits> cells;  // row-major

    const CellBits& at(int row, int col) const {
        return cells.at(static_cast<std::size_t>(row * width + col));
    }
    friend bool operator==(const GridEncoding&, const GridEncoding&) = default;
};

GridEncoding grid_encoding(const GridState& state);

/// What a listener can read back out of one encoded cell.
struct DecodedCell {
    bool impassable = false;
    std::optional<int> size;
    std::optional<Shape> shape;
    std::optional<Color> color;
    std::optional<Heading> agent_heading;  // set when the agent is in the cell
};

DecodedCell decode_cell(const CellBits& bits);

}  // namespace gridcomm
