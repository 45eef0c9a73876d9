#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridcomm/channel.hpp"
#include "gridcomm/config.hpp"
#include "gridcomm/episode.hpp"
#include "gridcomm/metrics.hpp"
#include "gridcomm/trace.hpp"

namespace gridcomm {

// Wire protocol: one JSON object per line in each direction.
//
//   {"cmd":"reset","seed":7,"config":{...}}   seed and config optional
//   {"cmd":"speak","messages":[[0,1,0,0],...]}
//   {"cmd":"step","action":"forward"}         name or index
//   {"cmd":"baseline","kind":"perfect_speaker"}  or "oracle_listener", "none"
//   {"cmd":"render","cell_px":30,"out":"frame.ppm"}  out optional
//   {"cmd":"metrics","view":"concatenated","alpha":0}
//   {"cmd":"close"}
//
// Successful responses carry "ok":true. Failures are
// {"error":"BAD_CMD"|"BAD_STATE"|"VALIDATION"|"CONFIG","detail":"..."}.
// Speaker-side data lives under "speaker", listener-side data under
// "listener"; the concept never appears in the listener object and the grid
// never appears in the speaker object.

class Session {
public:
    explicit Session(SessionConfig config, std::shared_ptr<TraceSink> sink = nullptr);

    nlohmann::json handle(const nlohmann::json& request);
    std::string handle_line(const std::string& line);

    bool closed() const { return closed_; }
    const SessionConfig& config() const { return config_; }
    const std::vector<TraceRecord>& trace() const { return trace_; }

    /// Full state of the running episode, for in-process scripted policies.
    /// Never serialised to either agent.
    const Episode* episode() const { return episode_ ? &*episode_ : nullptr; }

private:
    nlohmann::json reset(const nlohmann::json& req);
    nlohmann::json speak(const nlohmann::json& req);
    nlohmann::json step(const nlohmann::json& req);
    nlohmann::json baseline(const nlohmann::json& req);
    nlohmann::json render(const nlohmann::json& req);
    nlohmann::json metrics(const nlohmann::json& req);
    nlohmann::json close();

    nlohmann::json listener_grid() const;
    nlohmann::json listener_messages() const;
    void store_messages(const MessageSet& msgs);
    void finish_episode();

    SessionConfig base_config_;
    SessionConfig config_;
    std::string digest_;
    std::shared_ptr<TraceSink> sink_;

    std::optional<BaselineKind> speaker_baseline_;
    bool oracle_view_ = false;

    std::optional<Episode> episode_;
    std::int64_t next_episode_id_ = 0;
    std::int64_t episode_id_ = -1;
    std::uint64_t episode_seed_ = 0;
    double illumination_ = 1.0;
    std::optional<MessageSet> messages_;
    std::vector<Action> actions_;
    double return_ = 0.0;
    bool done_ = false;

    std::vector<TraceRecord> trace_;
    bool closed_ = false;
};

/// Error response helper shared with the transport layer.
nlohmann::json protocol_error(const std::string& code, const std::string& detail);

}  // namespace gridcomm
