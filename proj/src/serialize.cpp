#include "gridcomm/serialize.hpp"

#include <algorithm>

#include "gridcomm/error.hpp"

namespace gridcomm {

using nlohmann::json;

namespace {

json position_json(Position p) { return json::array({p.col, p.row}); }

json object_json(const ObjectSpec& o) {
    return json{{"id", o.id},
                {"shape", std::string(to_string(o.shape))},
                {"color", std::string(to_string(o.color))},
                {"size", o.size},
                {"weight", std::string(to_string(o.weight))}};
}

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError(std::string("missing field '") + key + "'", key);
    }
    return obj.at(key);
}

int int_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' is not an integer", key);
    return v.get<int>();
}

std::string string_field(const json& obj, const char* key) {
    const json& v = field(obj, key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' is not a string", key);
    return v.get<std::string>();
}

template <typename T>
T parse_enum(const std::string& word, std::optional<T> (*from)(std::string_view)) {
    const auto v = from(word);
    if (!v) throw ParseError("unknown name '" + word + "'", word);
    return *v;
}

Position position_from(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
        throw ParseError("position must be [col, row]", v.dump());
    }
    return {v[0].get<int>(), v[1].get<int>()};
}

ObjectSpec object_from(const json& v) {
    ObjectSpec o;
    o.id = int_field(v, "id");
    o.shape = parse_enum(string_field(v, "shape"), &shape_from_string);
    o.color = parse_enum(string_field(v, "color"), &color_from_string);
    o.size = int_field(v, "size");
    o.weight = parse_enum(string_field(v, "weight"), &weight_from_string);
    return o;
}

}  // namespace

json actions_to_json(const std::vector<Action>& actions) {
    json out = json::array();
    for (Action a : actions) out.push_back(std::string(to_string(a)));
    return out;
}

json episode_to_json(const Episode& ep) {
    const GridState& s = ep.state;
    json obstacles = json::array();
    json walls = json::array();
    json objects = json::array();
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            const CellContent& cell = s.at({c, r});
            if (std::holds_alternative<ObstacleCell>(cell)) obstacles.push_back(position_json({c, r}));
            if (std::holds_alternative<WallCell>(cell)) walls.push_back(position_json({c, r}));
            if (const auto* o = std::get_if<ObjectSpec>(&cell)) {
                json j = object_json(*o);
                j["at"] = position_json({c, r});
                objects.push_back(std::move(j));
            }
        }
    }
    // Id order, so parsing rebuilds the object tracks in their original order.
    std::sort(objects.begin(), objects.end(),
              [](const json& a, const json& b) { return a["id"].get<int>() < b["id"].get<int>(); });
    json agent{{"at", position_json(s.agent.position)},
               {"heading", std::string(to_string(s.agent.heading))},
               {"carried", s.agent.carried ? object_json(*s.agent.carried) : json(nullptr)}};
    return json{{"width", s.width},
                {"height", s.height},
                {"obstacles", obstacles},
                {"walls", walls},
                {"objects", objects},
                {"agent", agent},
                {"task",
                 {{"verb", std::string(to_string(ep.task.verb))},
                  {"count", ep.task.count},
                  {"target", ep.task.target_id}}},
                {"instruction", ep.instruction.text()},
                {"concept", ep.concept_vector.to_string()},
                {"lights_out", ep.lights_out_active}};
}

Episode episode_from_json(const json& doc) {
    Episode ep;
    const int w = int_field(doc, "width");
    const int h = int_field(doc, "height");
    if (w <= 0 || h <= 0) throw ParseError("grid dimensions must be positive", doc.dump());
    ep.state = GridState(w, h);
    try {
        for (const auto& p : field(doc, "obstacles")) ep.state.add_obstacle(position_from(p));
        for (const auto& p : field(doc, "walls")) ep.state.add_wall(position_from(p));
        for (const auto& o : field(doc, "objects")) {
            ep.state.add_object(position_from(field(o, "at")), object_from(o));
        }
    } catch (const ContractError& e) {
        throw ParseError(std::string("inconsistent grid: ") + e.what(), "objects");
    }
    const json& agent = field(doc, "agent");
    ep.state.agent.position = position_from(field(agent, "at"));
    ep.state.agent.heading = parse_enum(string_field(agent, "heading"), &heading_from_string);
    if (const json& c = field(agent, "carried"); !c.is_null()) ep.state.agent.carried = object_from(c);

    const json& task = field(doc, "task");
    ep.task.verb = parse_enum(string_field(task, "verb"), &verb_from_string);
    ep.task.count = int_field(task, "count");
    ep.task.target_id = int_field(task, "target");
    ep.instruction = Instruction::from_text(string_field(doc, "instruction"));
    try {
        ep.concept_vector = ConceptVector::from_string(string_field(doc, "concept"));
    } catch (const ContractError& e) {
        throw ParseError(e.what(), "concept");
    }
    const json& lo = field(doc, "lights_out");
    if (!lo.is_boolean()) throw ParseError("field 'lights_out' is not a boolean", "lights_out");
    ep.lights_out_active = lo.get<bool>();

    if (auto bad = find_invariant_violation(ep.state)) throw ParseError("invalid episode: " + *bad, "episode");
    if (ep.state.find_spec(ep.task.target_id) == nullptr) throw ParseError("task target not in episode", "target");
    return ep;
}

}  // namespace gridcomm
