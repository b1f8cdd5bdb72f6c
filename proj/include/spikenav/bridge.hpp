#pragma once

// Datagram wire protocol between the controller and a (simulated) robot.
// One line-oriented ASCII message per datagram, prefixed with a sequence
// tag: requests `<seq> SENSE` / `<seq> MOVE <F|L|R|B>`, responses
// `<seq> OBST <r> <f> <l> <g_r> <g_f> <g_l>` / `<seq> OK` / `<seq> ERR <why>`.

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>

#include "spikenav/gridworld.hpp"
#include "spikenav/navigator.hpp"

namespace spikenav {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    static Endpoint parse(const std::string& text);
    std::string to_string() const;
};

class UdpSocket {
public:
    UdpSocket();
    ~UdpSocket();
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    void bind(const Endpoint& ep);
    Endpoint local_endpoint() const;
    void set_receive_timeout_ms(int ms);

    void send_to(const std::string& payload, const Endpoint& to);
    // Returns the payload and fills `from`; nullopt on timeout.
    std::optional<std::string> receive(Endpoint& from);

    void close();

private:
    int fd_ = -1;
};

// Serves SENSE/MOVE against a grid environment, keeping the authoritative
// pose. Requests are handled strictly one at a time; a repeated sequence
// tag gets the cached response instead of a second application.
class RobotServer {
public:
    RobotServer(GridEnv env, Pose initial_pose);
    ~RobotServer();

    void start(const Endpoint& bind_to);
    void stop();
    Endpoint endpoint() const;
    Pose pose() const;

    // Exposed for protocol tests.
    std::string handle_line(const std::string& line);

private:
    void loop();

    GridEnv env_;
    Pose pose_;
    std::uint64_t last_seq_ = 0;
    bool any_handled_ = false;
    std::string last_response_;

    UdpSocket socket_;
    std::thread thread_;
    std::atomic<bool> running_{false};
    mutable std::mutex mutex_;
};

// Environment adapter that answers sense/apply_move over the wire. Grid
// geometry (dimensions, start, goal, heading) comes from the local config;
// occupancy comes from the robot.
class RemoteEnvironment : public EnvironmentInterface {
public:
    RemoteEnvironment(GridEnv geometry, Endpoint server, int timeout_ms = 1000);

    int width() const override { return geometry_.width; }
    int height() const override { return geometry_.height; }
    int start() const override { return geometry_.start; }
    int goal() const override { return geometry_.goal; }
    Heading initial_heading() const override { return geometry_.initial_heading; }
    SenseResult sense(const Pose& pose) override;
    Pose apply_move(const Pose& pose, Direction command) override;

private:
    std::string request(const std::string& body);

    GridEnv geometry_;
    Endpoint server_;
    int timeout_ms_;
    std::uint64_t seq_ = 0;
    UdpSocket socket_;
};

}  // namespace spikenav
