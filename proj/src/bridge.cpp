#include "spikenav/bridge.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace spikenav {

Endpoint Endpoint::parse(const std::string& text) {
    Endpoint ep;
    auto colon = text.rfind(':');
    std::string port_part;
    if (colon == std::string::npos) {
        port_part = text;
    } else {
        if (colon > 0) ep.host = text.substr(0, colon);
        port_part = text.substr(colon + 1);
    }
    if (port_part.empty()) throw std::invalid_argument("endpoint: missing port");
    const long port = std::stol(port_part);
    if (port < 0 || port > 65535) throw std::invalid_argument("endpoint: bad port");
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

std::string Endpoint::to_string() const {
    return host + ":" + std::to_string(port);
}

static sockaddr_in to_sockaddr(const Endpoint& ep) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(ep.port);
    if (::inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1)
        throw std::invalid_argument("endpoint: bad IPv4 address: " + ep.host);
    return addr;
}

UdpSocket::UdpSocket() {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::runtime_error("socket() failed");
}

UdpSocket::~UdpSocket() { close(); }

void UdpSocket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void UdpSocket::bind(const Endpoint& ep) {
    sockaddr_in addr = to_sockaddr(ep);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw std::runtime_error("bind to " + ep.to_string() + " failed: " +
                                 std::strerror(errno));
}

Endpoint UdpSocket::local_endpoint() const {
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
        throw std::runtime_error("getsockname failed");
    char buf[INET_ADDRSTRLEN];
    ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof(buf));
    return {buf, ntohs(addr.sin_port)};
}

void UdpSocket::set_receive_timeout_ms(int ms) {
    timeval tv{};
    tv.tv_sec = ms / 1000;
    tv.tv_usec = (ms % 1000) * 1000;
    ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
}

void UdpSocket::send_to(const std::string& payload, const Endpoint& to) {
    sockaddr_in addr = to_sockaddr(to);
    if (::sendto(fd_, payload.data(), payload.size(), 0,
                 reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
        throw std::runtime_error("sendto failed");
}

std::optional<std::string> UdpSocket::receive(Endpoint& from) {
    char buf[2048];
    sockaddr_in addr{};
    socklen_t len = sizeof(addr);
    const ssize_t n = ::recvfrom(fd_, buf, sizeof(buf), 0,
                                 reinterpret_cast<sockaddr*>(&addr), &len);
    if (n < 0) {
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR ||
            errno == EBADF)
            return std::nullopt;
        return std::nullopt;
    }
    char host[INET_ADDRSTRLEN];
    ::inet_ntop(AF_INET, &addr.sin_addr, host, sizeof(host));
    from = {host, ntohs(addr.sin_port)};
    return std::string(buf, static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------
// Server
// ---------------------------------------------------------------------------

RobotServer::RobotServer(GridEnv env, Pose initial_pose)
    : env_(std::move(env)), pose_(initial_pose) {
    env_.validate();
    if (!env_.on_grid(pose_.position) || env_.obstacles.count(pose_.position))
        throw std::invalid_argument("robot server: bad initial pose");
}

RobotServer::~RobotServer() { stop(); }

void RobotServer::start(const Endpoint& bind_to) {
    socket_.bind(bind_to);
    socket_.set_receive_timeout_ms(100);
    running_ = true;
    thread_ = std::thread([this] { loop(); });
}

void RobotServer::stop() {
    running_ = false;
    if (thread_.joinable()) thread_.join();
    socket_.close();
}

Endpoint RobotServer::endpoint() const { return socket_.local_endpoint(); }

Pose RobotServer::pose() const {
    std::lock_guard lock(mutex_);
    return pose_;
}

static std::string strip_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string RobotServer::handle_line(const std::string& raw) {
    const std::string line = strip_newline(raw);
    std::istringstream ls(line);
    std::uint64_t seq = 0;
    std::string cmd;
    if (!(ls >> seq >> cmd)) return "0 ERR bad-request\n";

    std::lock_guard lock(mutex_);
    if (any_handled_ && seq == last_seq_) return last_response_;  // duplicate

    std::ostringstream os;
    os << seq << ' ';
    if (cmd == "SENSE") {
        std::string extra;
        if (ls >> extra) {
            os << "ERR bad-request";
        } else {
            const auto r = spikenav::sense(env_, pose_);
            auto occupied = [](const CellObservation& o) {
                return o.kind == CellKind::Obstacle ? 1 : 0;
            };
            auto goal_flag = [](const CellObservation& o) {
                return o.kind == CellKind::Goal ? 1 : 0;
            };
            os << "OBST " << occupied(r.right) << ' ' << occupied(r.front) << ' '
               << occupied(r.left) << ' ' << goal_flag(r.right) << ' '
               << goal_flag(r.front) << ' ' << goal_flag(r.left);
        }
    } else if (cmd == "MOVE") {
        std::string arg, extra;
        if (!(ls >> arg) || arg.size() != 1 || (ls >> extra)) {
            os << "ERR bad-request";
        } else {
            Heading target_heading;
            switch (arg[0]) {
                case 'F': target_heading = pose_.heading; break;
                case 'L': target_heading = turn_left(pose_.heading); break;
                case 'R': target_heading = turn_right(pose_.heading); break;
                case 'B': target_heading = opposite(pose_.heading); break;
                default: target_heading = pose_.heading; arg.clear(); break;
            }
            if (arg.empty()) {
                os << "ERR bad-request";
            } else {
                auto target = neighbor(env_, pose_.position, target_heading);
                if (!target || env_.obstacles.count(*target)) {
                    os << "ERR blocked";
                } else {
                    pose_ = Pose{*target, target_heading};
                    os << "OK";
                }
            }
        }
    } else {
        os << "ERR bad-request";
    }
    os << '\n';
    last_seq_ = seq;
    any_handled_ = true;
    last_response_ = os.str();
    return last_response_;
}

void RobotServer::loop() {
    while (running_) {
        Endpoint from;
        auto payload = socket_.receive(from);
        if (!payload) continue;
        const std::string response = handle_line(*payload);
        socket_.send_to(response, from);
    }
}

// ---------------------------------------------------------------------------
// Client adapter
// ---------------------------------------------------------------------------

RemoteEnvironment::RemoteEnvironment(GridEnv geometry, Endpoint server,
                                     int timeout_ms)
    : geometry_(std::move(geometry)), server_(server), timeout_ms_(timeout_ms) {
    geometry_.validate();
    socket_.set_receive_timeout_ms(timeout_ms_);
}

std::string RemoteEnvironment::request(const std::string& body) {
    const std::uint64_t seq = ++seq_;
    std::ostringstream os;
    os << seq << ' ' << body << '\n';
    const std::string datagram = os.str();

    for (int attempt = 0; attempt < 2; ++attempt) {
        socket_.send_to(datagram, server_);
        for (;;) {
            Endpoint from;
            auto payload = socket_.receive(from);
            if (!payload) break;  // timeout; retry once
            std::istringstream rs(*payload);
            std::uint64_t rseq = 0;
            if (!(rs >> rseq) || rseq != seq) continue;  // stale duplicate
            std::string rest;
            std::getline(rs, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            return strip_newline(rest);
        }
    }
    throw std::runtime_error("robot bridge: no response from " +
                             server_.to_string() + " after retry");
}

SenseResult RemoteEnvironment::sense(const Pose& pose) {
    const std::string response = request("SENSE");
    std::istringstream rs(response);
    std::string tag;
    int occ[3], goal[3];
    if (!(rs >> tag >> occ[0] >> occ[1] >> occ[2] >> goal[0] >> goal[1] >>
          goal[2]) ||
        tag != "OBST")
        throw std::runtime_error("robot bridge: bad SENSE response: " + response);

    SenseResult result;
    const Heading dirs[3] = {turn_right(pose.heading), pose.heading,
                             turn_left(pose.heading)};
    CellObservation* cells[3] = {&result.right, &result.front, &result.left};
    for (int i = 0; i < 3; ++i) {
        cells[i]->target = grid_neighbor(geometry_.width, geometry_.height,
                                         pose.position, dirs[i]);
        if (occ[i]) cells[i]->kind = CellKind::Obstacle;
        else if (goal[i]) cells[i]->kind = CellKind::Goal;
        else cells[i]->kind = CellKind::Free;
    }
    return result;
}

Pose RemoteEnvironment::apply_move(const Pose& pose, Direction command) {
    const Heading target_heading = direction_heading(command);
    char arg;
    if (target_heading == pose.heading) arg = 'F';
    else if (target_heading == turn_left(pose.heading)) arg = 'L';
    else if (target_heading == turn_right(pose.heading)) arg = 'R';
    else arg = 'B';

    const std::string response = request(std::string("MOVE ") + arg);
    if (response == "OK") {
        auto target = grid_neighbor(geometry_.width, geometry_.height,
                                    pose.position, target_heading);
        if (!target) throw std::runtime_error("robot bridge: OK for an off-grid move");
        return Pose{*target, target_heading};
    }
    throw std::runtime_error("robot bridge: move rejected: " + response);
}

}  // namespace spikenav
