#pragma once

#include <iosfwd>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridcomm/metrics.hpp"

namespace gridcomm {

// One JSON object per line:
//   {"episode_id":3,"seed":..,"config_digest":"..","concept":"0100..",
//    "messages":[[2,0,1]],"raw":[[[0.1,..],..]],"actions":["forward"],"reward":1.0}
// "raw" is present only for records that carry raw continuous messages.

nlohmann::json trace_record_to_json(const TraceRecord& record);
/// Throws ParseError on missing or ill-typed fields.
TraceRecord trace_record_from_json(const nlohmann::json& doc);

/// Writes records stably sorted by episode_id.
void write_trace(std::span<const TraceRecord> records, std::ostream& out);
void write_trace(std::span<const TraceRecord> records, const std::string& path);

/// Errors are ParseError with messages of the form "line N: ...".
std::vector<TraceRecord> read_trace(std::istream& in);
std::vector<TraceRecord> read_trace(const std::string& path);

/// Append-only record store shared by server sessions. Every flush rewrites
/// the whole file so it stays sorted.
class TraceSink {
public:
    explicit TraceSink(std::string path);

    void append(std::span<const TraceRecord> records);
    void flush();
    std::size_t size() const;

private:
    std::string path_;
    mutable std::mutex mu_;
    std::vector<TraceRecord> records_;
};

}  // namespace gridcomm
