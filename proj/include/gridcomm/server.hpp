#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "gridcomm/config.hpp"
#include "gridcomm/trace.hpp"

namespace gridcomm {

/// One session over a line stream. Returns after "close" or end of input.
void serve_stream(const SessionConfig& config, std::istream& in, std::ostream& out,
                  std::shared_ptr<TraceSink> sink);

/// Loopback TCP server, one session and one thread per connection.
class TcpServer {
public:
    /// Binds 127.0.0.1:port; port 0 picks a free port.
    TcpServer(SessionConfig config, int port, std::shared_ptr<TraceSink> sink);
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    int port() const { return port_; }

    /// Accepts connections until stop() is called.
    void run();
    void stop();

private:
    void serve_connection(int fd);

    SessionConfig config_;
    std::shared_ptr<TraceSink> sink_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

}  // namespace gridcomm
