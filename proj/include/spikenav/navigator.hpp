#pragma once

// Iteration orchestrator: maps the local surroundings into the hippocampal
// memory, lets the parietal circuit pick the next move from the recalled
// neighbor states, falls back to Manhattan-distance planning, and handles
// dead ends by backtracking along the traveled path.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spikenav/gridworld.hpp"
#include "spikenav/memory.hpp"
#include "spikenav/ppc.hpp"
#include "spikenav/snn.hpp"

namespace spikenav {

// Pure grid geometry, shared by the local and remote environments.
std::optional<int> grid_neighbor(int width, int height, int position, Heading dir);
int grid_manhattan(int width, int a, int b);

class EnvironmentInterface {
public:
    virtual ~EnvironmentInterface() = default;
    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual int start() const = 0;
    virtual int goal() const = 0;
    virtual Heading initial_heading() const = 0;
    virtual SenseResult sense(const Pose& pose) = 0;
    virtual Pose apply_move(const Pose& pose, Direction command) = 0;
};

class LocalEnvironment : public EnvironmentInterface {
public:
    explicit LocalEnvironment(GridEnv env) : env_(std::move(env)) { env_.validate(); }
    int width() const override { return env_.width; }
    int height() const override { return env_.height; }
    int start() const override { return env_.start; }
    int goal() const override { return env_.goal; }
    Heading initial_heading() const override { return env_.initial_heading; }
    SenseResult sense(const Pose& pose) override { return spikenav::sense(env_, pose); }
    Pose apply_move(const Pose& pose, Direction command) override {
        return spikenav::apply_move(env_, pose, command);
    }
    const GridEnv& grid() const { return env_; }

private:
    GridEnv env_;
};

enum class NavMode { Normal, Backtracking };

struct DecisionOutcome {
    enum class Kind { Move, Planned, DeadEnd, GoalReached } kind;
    Direction direction = Direction::Up;  // Move / GoalReached
    int planned = 0;                      // Planned
};

struct NavState {
    NavMode mode = NavMode::Normal;
    Pose pose;
    std::optional<int> predecessor;
    std::optional<int> planned_next;
    int iteration = 0;
    bool done = false;
};

struct IterationRecord {
    int iteration = 0;
    NavMode mode = NavMode::Normal;
    int position = 0;
    DecisionOutcome::Kind outcome = DecisionOutcome::Kind::Planned;
    std::string detail;
};

struct StateWrite {
    int iteration = 0;  // 0 = during initialization
    int position = 0;
    StateCode state = StateCode::Free;
};

struct RunReport {
    bool goal_reached = false;
    int iterations = 0;
    std::vector<int> trajectory;  // cells entered, in order, starting cell first
    std::vector<IterationRecord> log;
    std::vector<StateWrite> writes;
    std::string final_map;
    std::string spike_log_csv;
    std::string diagnostic;  // nonempty when the goal was not reached

    std::string trajectory_text() const;
    std::string iteration_log_text() const;
};

struct NavigatorOptions {
    int max_iterations = 0;  // 0 = 10 * width * height
    // Forgetting horizon for the run's memory; 0 keeps the whole map alive,
    // which is what the experiment traces show.
    int forget_horizon = 0;
};

class Navigator {
public:
    explicit Navigator(EnvironmentInterface& env, NavigatorOptions options = {});

    // Learns the start and goal states, then iterates to termination.
    RunReport run();

    const NavState& state() const { return state_; }
    HippocampalMemory& memory() { return *memory_; }
    Ppc& ppc() { return *ppc_; }
    Network& network() { return *net_; }

    // Exposed for tests: one phase at a time.
    void initialize();
    void mapping_phase();
    DecisionOutcome decision_phase();
    void backtrack_step();
    bool finished() const { return state_.done || failed_; }

private:
    struct SlotView {
        std::optional<int> cell;
        std::optional<StateCode> recalled;
        bool out_fired = false;
    };

    std::optional<int> neighbor_cell(int position, Direction d) const;
    std::array<SlotView, 4> decision_window();
    void write_state(int position, StateCode state);
    void do_move(Direction d);
    std::vector<int> plan_candidates(int position) const;
    void fail(const std::string& diagnostic);

    EnvironmentInterface& env_;
    NavigatorOptions opts_;

    std::unique_ptr<Network> net_;
    std::unique_ptr<HippocampalMemory> memory_;
    std::unique_ptr<Ppc> ppc_;

    NavState state_;
    std::vector<int> path_;  // clean forward path, start first
    RunReport report_;
    bool failed_ = false;
    bool initialized_ = false;
};

RunReport run_navigation(const GridEnv& env, NavigatorOptions options = {});

}  // namespace spikenav
