#include "gridcomm/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "gridcomm/error.hpp"
#include "gridcomm/session.hpp"

namespace gridcomm {

void serve_stream(const SessionConfig& config, std::istream& in, std::ostream& out,
                  std::shared_ptr<TraceSink> sink) {
    Session session(config, std::move(sink));
    std::string line;
    while (!session.closed() && std::getline(in, line)) {
        if (line.empty()) continue;
        out << session.handle_line(line) << '\n';
        out.flush();
    }
    if (!session.closed()) session.handle({{"cmd", "close"}});
}

TcpServer::TcpServer(SessionConfig config, int port, std::shared_ptr<TraceSink> sink)
    : config_(std::move(config)), sink_(std::move(sink)) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
        ::listen(listen_fd_, 16) < 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw Error("cannot listen on port " + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    stop();
    std::lock_guard lock(workers_mu_);
    for (auto& t : workers_) {
        if (t.joinable()) t.join();
    }
}

void TcpServer::run() {
    while (!stopping_) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_) break;
            if (errno == EINTR) continue;
            break;
        }
        std::lock_guard lock(workers_mu_);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void TcpServer::stop() {
    if (stopping_.exchange(true)) return;
    // Unblocks accept() in run().
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
}

namespace {

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

}  // namespace

void TcpServer::serve_connection(int fd) {
    Session session(config_, sink_);
    std::string buffer;
    char chunk[4096];
    while (!session.closed()) {
        const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t nl;
        while (!session.closed() && (nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (!send_all(fd, session.handle_line(line) + "\n")) {
                ::close(fd);
                return;
            }
        }
    }
    if (!session.closed()) session.handle({{"cmd", "close"}});
    ::close(fd);
}

}  // namespace gridcomm
