#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gridcomm {

// Enumerator order matches the bit order of the cell and concept encodings,
// so the underlying value doubles as the bit offset inside its group.

enum class Shape : std::uint8_t { kSquare, kCylinder, kCircle, kDiamond };
enum class Color : std::uint8_t { kRed, kBlue, kYellow, kGreen };
enum class Weight : std::uint8_t { kLight, kHeavy };
enum class Heading : std::uint8_t { kEast, kSouth, kWest, kNorth };
enum class Verb : std::uint8_t { kWalk, kPush, kPull, kPickup, kDrop };

enum class Action : std::uint8_t {
    kLeft,
    kRight,
    kForward,
    kBackward,
    kPush,
    kPull,
    kPickup,
    kDrop,
};

inline constexpr int kNumShapes = 4;
inline constexpr int kNumColors = 4;
inline constexpr int kNumSizes = 4;
inline constexpr int kNumWeights = 2;
inline constexpr int kNumHeadings = 4;
inline constexpr int kNumActions = 8;

inline constexpr std::array<Shape, kNumShapes> kAllShapes{
    Shape::kSquare, Shape::kCylinder, Shape::kCircle, Shape::kDiamond};
inline constexpr std::array<Color, kNumColors> kAllColors{
    Color::kRed, Color::kBlue, Color::kYellow, Color::kGreen};
inline constexpr std::array<Weight, kNumWeights> kAllWeights{Weight::kLight, Weight::kHeavy};
inline constexpr std::array<Heading, kNumHeadings> kAllHeadings{
    Heading::kEast, Heading::kSouth, Heading::kWest, Heading::kNorth};
inline constexpr std::array<Action, kNumActions> kAllActions{
    Action::kLeft, Action::kRight, Action::kForward, Action::kBackward,
    Action::kPush, Action::kPull, Action::kPickup, Action::kDrop};

/// Grid coordinate; (0,0) is the top-left cell, col grows east, row grows south.
struct Position {
    int col = 0;
    int row = 0;

    friend constexpr auto operator<=>(const Position&, const Position&) = default;
};

struct Offset {
    int dcol = 0;
    int drow = 0;
};

constexpr Position operator+(Position p, Offset o) { return {p.col + o.dcol, p.row + o.drow}; }

constexpr Offset heading_offset(Heading h) {
    switch (h) {
        case Heading::kEast: return {1, 0};
        case Heading::kSouth: return {0, 1};
        case Heading::kWest: return {-1, 0};
        case Heading::kNorth: return {0, -1};
    }
    return {0, 0};
}

constexpr Offset reversed(Offset o) { return {-o.dcol, -o.drow}; }

/// 90 degree turn counter-clockwise (left) or clockwise (right) on screen.
constexpr Heading turn_left(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 3) % kNumHeadings);
}
constexpr Heading turn_right(Heading h) {
    return static_cast<Heading>((static_cast<int>(h) + 1) % kNumHeadings);
}

struct ObjectSpec {
    int id = 0;
    Shape shape = Shape::kSquare;
    Color color = Color::kRed;
    int size = 1;  // 1..4
    Weight weight = Weight::kLight;

    friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

/// True when both objects look identical to the listener (shape, color, size).
constexpr bool same_visible_attributes(const ObjectSpec& a, const ObjectSpec& b) {
    return a.shape == b.shape && a.color == b.color && a.size == b.size;
}

std::string_view to_string(Shape s);
std::string_view to_string(Color c);
std::string_view to_string(Weight w);
std::string_view to_string(Heading h);
std::string_view to_string(Verb v);
std::string_view to_string(Action a);

std::optional<Shape> shape_from_string(std::string_view s);
std::optional<Color> color_from_string(std::string_view s);
std::optional<Weight> weight_from_string(std::string_view s);
std::optional<Heading> heading_from_string(std::string_view s);
std::optional<Verb> verb_from_string(std::string_view s);
std::optional<Action> action_from_string(std::string_view s);

/// Converts a wire-level action index; throws ContractError outside [0, 8).
Action action_from_index(int index);

}  // namespace gridcomm
