#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "spikenav/bridge.hpp"
#include "spikenav/gridworld.hpp"
#include "spikenav/memory.hpp"
#include "spikenav/navigator.hpp"
#include "spikenav/ppc.hpp"
#include "spikenav/snn.hpp"

namespace fs = std::filesystem;
using namespace spikenav;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
}

char state_char(StateCode s) {
    switch (s) {
        case StateCode::Start: return 'S';
        case StateCode::Goal: return 'G';
        case StateCode::Unexplored: return ' ';
        case StateCode::StepInPath: return '*';
        case StateCode::Crossroad: return '+';
        case StateCode::Free: return '.';
        case StateCode::Obstacle: return '#';
        case StateCode::DeadEnd: return 'X';
    }
    return '?';
}

// One character per cell from the `position,state,name` dump; unexplored
// cells stay blank.
std::string render_ascii_map(int width, int height, const std::string& map_csv) {
    std::map<int, StateCode> states;
    std::istringstream in(map_csv);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int pos, state;
        char comma;
        if (ls >> pos >> comma >> state) states[pos] = static_cast<StateCode>(state);
    }
    std::ostringstream os;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const int pos = r * width + c + 1;
            auto it = states.find(pos);
            os << (it == states.end() ? ' ' : state_char(it->second));
        }
        os << '\n';
    }
    return os.str();
}

int cmd_ppc_poc(const std::string& out_dir, Tick init_delay, Tick step_delay,
                bool empty_schedule) {
    std::vector<PopulationSpec> pops;
    std::vector<SynapseGroupSpec> syns;
    PpcConfig cfg;
    cfg.num_commands = 4;
    cfg.num_match_inputs = 2;
    cfg.init_delay = init_delay;
    cfg.step_delay = step_delay;
    Ppc ppc(cfg, pops, syns);
    Network net(std::move(pops), std::move(syns));
    ppc.attach(net);

    const Tick searching[4] = {1, 51, 101, 151};
    const int input_line[4] = {0, 0, 1, 1};

    std::ostringstream decisions;
    std::cout << "ppc-poc: init_delay=" << init_delay
              << " step_delay=" << step_delay << "\n";
    for (int k = 0; k < 4; ++k) {
        std::vector<std::pair<int, Tick>> schedule;
        if (!empty_schedule)
            schedule.push_back({input_line[k], ppc.aligned_input_tick(searching[k], k)});
        auto cmd = ppc.decide(searching[k], schedule);
        decisions << "decision " << (k + 1) << ": ";
        if (cmd) decisions << "command " << *cmd;
        else decisions << "none";
        decisions << '\n';
    }
    std::cout << decisions.str();

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "raster.csv", net.export_spike_log());
        write_file(fs::path(out_dir) / "decisions.txt", decisions.str());
        std::cout << "wrote " << out_dir << "/raster.csv and decisions.txt\n";
    }
    return 0;
}

int cmd_navigate(const std::string& env_path, const std::string& out_dir,
                 const std::string& bridge, int max_iterations) {
    GridEnv env = load_env_config(env_path);

    RunReport report;
    NavigatorOptions opts;
    opts.max_iterations = max_iterations;
    if (bridge.empty()) {
        LocalEnvironment local(env);
        Navigator nav(local, opts);
        report = nav.run();
    } else {
        int timeout_ms = 1000;
        if (const char* t = std::getenv("SPIKENAV_BRIDGE_TIMEOUT_MS"))
            timeout_ms = std::atoi(t);
        RemoteEnvironment remote(env, Endpoint::parse(bridge), timeout_ms);
        Navigator nav(remote, opts);
        report = nav.run();
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "trajectory.txt", report.trajectory_text());
        write_file(fs::path(out_dir) / "iterations.log", report.iteration_log_text());
        write_file(fs::path(out_dir) / "map.csv", report.final_map);
        write_file(fs::path(out_dir) / "map_ascii.txt",
                   render_ascii_map(env.width, env.height, report.final_map));
        write_file(fs::path(out_dir) / "raster.csv", report.spike_log_csv);
    }

    if (report.goal_reached) {
        std::cout << "goal reached at iteration " << report.iterations << "\n";
        return 0;
    }
    std::cout << "LIVELOCK iterations=" << report.iterations << " detail=\""
              << report.diagnostic << "\"\n";
    return 2;
}

std::atomic<bool> g_interrupted{false};

int cmd_serve_robot(const std::string& env_path, const std::string& bind) {
    GridEnv env = load_env_config(env_path);
    RobotServer server(env, Pose{env.start, env.initial_heading});
    server.start(Endpoint::parse(bind));
    std::cout << "serving " << env_path << " on " << server.endpoint().to_string()
              << " (Ctrl-C to stop)\n";
    std::signal(SIGINT, [](int) { g_interrupted = true; });
    std::signal(SIGTERM, [](int) { g_interrupted = true; });
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    const Pose p = server.pose();
    server.stop();
    std::cout << "stopped; robot at position " << p.position << " heading "
              << heading_char(p.heading) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "spikenav - spiking associative-memory navigation simulator\n"
        "Map characters: S start, G goal, * step-in-path, + crossroad, "
        ". free, # obstacle, X dead-end, ' ' unexplored."};
    app.require_subcommand(1);

    auto* poc = app.add_subcommand(
        "ppc-poc", "Run the four-decision parietal-circuit demonstration");
    std::string poc_out;
    Tick init_delay = 9, step_delay = 7;
    bool empty_schedule = false;
    poc->add_option("--out", poc_out, "Output directory for raster + decisions");
    poc->add_option("--init-delay", init_delay, "Initial chain delay (ms)");
    poc->add_option("--step-delay", step_delay, "Inter-slot chain delay (ms)");
    poc->add_flag("--empty-schedule", empty_schedule,
                  "Run the chain without any state-of-interest input");

    auto* nav = app.add_subcommand("navigate", "Run a mapping/navigation episode");
    std::string env_path, nav_out, bridge;
    int max_iterations = 0;
    int seed = 0;
    nav->add_option("--env", env_path, "Environment config file")->required();
    nav->add_option("--out", nav_out, "Output directory for run artifacts");
    nav->add_option("--bridge", bridge,
                    "Robot server address (host:port); default from "
                    "SPIKENAV_BRIDGE_ADDR");
    nav->add_option("--max-iterations", max_iterations, "Iteration cap override");
    nav->add_option("--seed", seed, "Reserved; the system is deterministic");

    auto* serve = app.add_subcommand("serve-robot", "Serve a simulated robot");
    std::string serve_env, bind_addr = "127.0.0.1:7071";
    serve->add_option("--env", serve_env, "Environment config file")->required();
    serve->add_option("--bind", bind_addr, "Bind address (host:port)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (poc->parsed())
            return cmd_ppc_poc(poc_out, init_delay, step_delay, empty_schedule);
        if (nav->parsed()) {
            if (bridge.empty())
                if (const char* a = std::getenv("SPIKENAV_BRIDGE_ADDR")) bridge = a;
            return cmd_navigate(env_path, nav_out, bridge, max_iterations);
        }
        if (serve->parsed()) return cmd_serve_robot(serve_env, bind_addr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
