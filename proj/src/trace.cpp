#include "gridcomm/trace.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "gridcomm/error.hpp"

namespace gridcomm {

using nlohmann::json;

json trace_record_to_json(const TraceRecord& r) {
    json actions = json::array();
    for (Action a : r.actions) actions.push_back(std::string(to_string(a)));
    json doc{{"episode_id", r.episode_id},
             {"seed", r.seed},
             {"config_digest", r.config_digest},
             {"concept", r.concept_vector.to_string()},
             {"messages", r.rounds},
             {"actions", actions},
             {"reward", r.reward}};
    if (!r.raw_rounds.empty()) {
        json raw = json::array();
        for (const MessageSet& m : r.raw_rounds) raw.push_back(m.messages);
        doc["raw"] = std::move(raw);
    }
    return doc;
}

namespace {

const json& need(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'", key);
    return doc.at(key);
}

}  // namespace

TraceRecord trace_record_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("record is not an object", doc.dump());
    TraceRecord r;
    try {
        r.episode_id = need(doc, "episode_id").get<std::int64_t>();
        r.seed = need(doc, "seed").get<std::uint64_t>();
        r.config_digest = need(doc, "config_digest").get<std::string>();
        r.concept_vector = ConceptVector::from_string(need(doc, "concept").get<std::string>());
        r.rounds = need(doc, "messages").get<std::vector<std::vector<std::int64_t>>>();
        for (const auto& a : need(doc, "actions")) {
            const auto action = action_from_string(a.get<std::string>());
            if (!action) throw ParseError("unknown action " + a.dump(), a.dump());
            r.actions.push_back(*action);
        }
        const json& reward = need(doc, "reward");
        if (!reward.is_number()) throw ParseError("field 'reward' is not a number", "reward");
        r.reward = reward.get<double>();
        if (doc.contains("raw")) {
            for (const auto& round : doc.at("raw")) {
                r.raw_rounds.push_back({round.get<std::vector<std::vector<double>>>()});
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("ill-typed field: ") + e.what(), doc.dump());
    } catch (const ContractError& e) {
        throw ParseError(e.what(), "concept");
    }
    return r;
}

void write_trace(std::span<const TraceRecord> records, std::ostream& out) {
    std::vector<const TraceRecord*> order;
    order.reserve(records.size());
    for (const auto& r : records) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const TraceRecord* a, const TraceRecord* b) {
        return a->episode_id < b->episode_id;
    });
    for (const TraceRecord* r : order) out << trace_record_to_json(*r).dump() << '\n';
}

void write_trace(std::span<const TraceRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open trace file '" + path + "' for writing");
    write_trace(records, out);
    if (!out) throw Error("failed writing trace file '" + path + "'");
}

std::vector<TraceRecord> read_trace(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(number) + ": ";
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(where + "malformed record (" + e.what() + ")", line);
        }
        try {
            records.push_back(trace_record_from_json(doc));
        } catch (const ParseError& e) {
            throw ParseError(where + e.what(), e.token());
        }
    }
    return records;
}

std::vector<TraceRecord> read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read trace file '" + path + "'");
    return read_trace(in);
}

TraceSink::TraceSink(std::string path) : path_(std::move(path)) {}

void TraceSink::append(std::span<const TraceRecord> records) {
    std::lock_guard lock(mu_);
    records_.insert(records_.end(), records.begin(), records.end());
}

void TraceSink::flush() {
    std::lock_guard lock(mu_);
    if (path_.empty()) return;
    write_trace(records_, path_);
}

std::size_t TraceSink::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

}  // namespace gridcomm
