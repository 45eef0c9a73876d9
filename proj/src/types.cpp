#include "gridcomm/types.hpp"

#include "gridcomm/error.hpp"

namespace gridcomm {

namespace {

constexpr std::array<std::string_view, kNumShapes> kShapeNames{"square", "cylinder", "circle",
                                                               "diamond"};
constexpr std::array<std::string_view, kNumColors> kColorNames{"red", "blue", "yellow", "green"};
constexpr std::array<std::string_view, kNumWeights> kWeightNames{"light", "heavy"};
constexpr std::array<std::string_view, kNumHeadings> kHeadingNames{"E", "S", "W", "N"};
constexpr std::array<std::string_view, 5> kVerbNames{"walk", "push", "pull", "pickup", "drop"};
constexpr std::array<std::string_view, kNumActions> kActionNames{
    "left", "right", "forward", "backward", "push", "pull", "pickup", "drop"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Shape s) { return kShapeNames.at(static_cast<std::size_t>(s)); }
std::string_view to_string(Color c) { return kColorNames.at(static_cast<std::size_t>(c)); }
std::string_view to_string(Weight w) { return kWeightNames.at(static_cast<std::size_t>(w)); }
std::string_view to_string(Heading h) { return kHeadingNames.at(static_cast<std::size_t>(h)); }
std::string_view to_string(Verb v) { return kVerbNames.at(static_cast<std::size_t>(v)); }
std::string_view to_string(Action a) { return kActionNames.at(static_cast<std::size_t>(a)); }

std::optional<Shape> shape_from_string(std::string_view s) { return lookup<Shape>(kShapeNames, s); }
std::optional<Color> color_from_string(std::string_view s) { return lookup<Color>(kColorNames, s); }
std::optional<Weight> weight_from_string(std::string_view s) {
    return lookup<Weight>(kWeightNames, s);
}
std::optional<Heading> heading_from_string(std::string_view s) {
    return lookup<Heading>(kHeadingNames, s);
}
std::optional<Verb> verb_from_string(std::string_view s) { return lookup<Verb>(kVerbNames, s); }
std::optional<Action> action_from_string(std::string_view s) {
    return lookup<Action>(kActionNames, s);
}

Action action_from_index(int index) {
    if (index < 0 || index >= kNumActions) {
        throw ContractError("unknown action id " + std::to_string(index));
    }
    return static_cast<Action>(index);
}

}  // namespace gridcomm
