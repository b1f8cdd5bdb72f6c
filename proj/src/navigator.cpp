#include "spikenav/navigator.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace spikenav {

std::optional<int> grid_neighbor(int width, int height, int position, Heading dir) {
    const int r = (position - 1) / width, c = (position - 1) % width;
    int nr = r, nc = c;
    switch (dir) {
        case Heading::North: nr = r - 1; break;
        case Heading::South: nr = r + 1; break;
        case Heading::East: nc = c + 1; break;
        case Heading::West: nc = c - 1; break;
    }
    if (nr < 0 || nr >= height || nc < 0 || nc >= width) return std::nullopt;
    return nr * width + nc + 1;
}

int grid_manhattan(int width, int a, int b) {
    const int ra = (a - 1) / width, ca = (a - 1) % width;
    const int rb = (b - 1) / width, cb = (b - 1) % width;
    return std::abs(ra - rb) + std::abs(ca - cb);
}

std::string RunReport::trajectory_text() const {
    std::ostringstream os;
    for (int p : trajectory) os << p << '\n';
    return os.str();
}

std::string RunReport::iteration_log_text() const {
    std::ostringstream os;
    for (const auto& rec : log) {
        os << "iter " << rec.iteration << ' '
           << (rec.mode == NavMode::Normal ? "normal" : "backtracking") << " pos "
           << rec.position << ' ' << rec.detail << '\n';
    }
    return os.str();
}

namespace {

constexpr std::array<Direction, 4> kSlotOrder = {Direction::Up, Direction::Left,
                                                 Direction::Down, Direction::Right};

// Distance ties go to the rightmost-then-downward slot.
constexpr std::array<int, 4> kTiePriority = {3, 2, 1, 0};  // Up, Left, Down, Right

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Up: return "up";
        case Direction::Left: return "left";
        case Direction::Down: return "down";
        case Direction::Right: return "right";
    }
    return "?";
}

}  // namespace

Navigator::Navigator(EnvironmentInterface& env, NavigatorOptions options)
    : env_(env), opts_(options) {
    std::vector<PopulationSpec> pops;
    std::vector<SynapseGroupSpec> syns;

    MemoryConfig mc;
    mc.grid_width = env_.width();
    mc.grid_height = env_.height();
    mc.forget_horizon = opts_.forget_horizon;
    memory_ = std::make_unique<HippocampalMemory>(mc, pops, syns);

    PpcConfig pc;
    pc.num_commands = 4;
    pc.num_match_inputs = 3;
    pc.init_delay = 9;
    pc.step_delay = kRecallDuration;  // one recall per chain slot
    ppc_ = std::make_unique<Ppc>(pc, pops, syns);

    // States of interest feed the match lines: goal, step-in-path, crossroad.
    connect_content_to_match_in(syns, "MemCont",
                                {static_cast<int>(StateCode::Goal),
                                 static_cast<int>(StateCode::StepInPath),
                                 static_cast<int>(StateCode::Crossroad)});

    net_ = std::make_unique<Network>(std::move(pops), std::move(syns));
    memory_->attach(*net_);
    ppc_->attach(*net_);
}

std::optional<int> Navigator::neighbor_cell(int position, Direction d) const {
    return grid_neighbor(env_.width(), env_.height(), position,
                         direction_heading(d));
}

void Navigator::write_state(int position, StateCode state) {
    const Tick t = memory_->next_free_tick();
    memory_->reinforce(position, state, t);
    net_->run_until(memory_->next_free_tick());
    report_.writes.push_back({state_.iteration, position, state});
}

void Navigator::initialize() {
    if (initialized_) return;
    state_.pose = Pose{env_.start(), env_.initial_heading()};
    state_.mode = NavMode::Normal;
    state_.iteration = 0;
    path_ = {env_.start()};
    report_.trajectory = {env_.start()};

    write_state(env_.start(), StateCode::Start);
    write_state(env_.goal(), StateCode::Goal);

    state_.done = (env_.start() == env_.goal());
    initialized_ = true;
}

void Navigator::mapping_phase() {
    const auto obs = env_.sense(state_.pose);
    for (const auto* o : {&obs.right, &obs.front, &obs.left}) {
        if (!o->target) continue;  // walls are not positions
        if (memory_->stored_state(*o->target)) continue;  // only unexplored cells
        StateCode s = StateCode::Free;
        if (o->kind == CellKind::Obstacle) s = StateCode::Obstacle;
        else if (o->kind == CellKind::Goal) s = StateCode::Goal;
        write_state(*o->target, s);
    }
}

std::array<Navigator::SlotView, 4> Navigator::decision_window() {
    const Tick t_s = std::max(memory_->next_free_tick(), net_->now());
    ppc_->inject_searching(t_s);

    std::array<SlotView, 4> slots;
    std::array<std::optional<RecallHandle>, 4> handles;
    for (int j = 0; j < 4; ++j) {
        slots[j].cell = neighbor_cell(state_.pose.position, kSlotOrder[j]);
        if (!slots[j].cell) continue;
        const Tick r = ppc_->aligned_input_tick(t_s, j) - 2;
        handles[j] = memory_->recall(*slots[j].cell, r);
    }

    net_->run_until(ppc_->window_end(t_s) + 1);

    for (int j = 0; j < 4; ++j) {
        if (!handles[j]) continue;
        slots[j].recalled = memory_->read_recall(*handles[j]);
        assert(slots[j].recalled == handles[j]->predicted);
    }
    for (const auto& [slot, tick] : ppc_->outputs_in_window(t_s)) {
        // Only a spike on the slot's exact coincidence tick counts.
        if (tick == ppc_->out_tick(t_s, slot)) slots[slot].out_fired = true;
    }
    return slots;
}

std::vector<int> Navigator::plan_candidates(int position) const {
    std::vector<int> out;
    for (Direction d : kSlotOrder) {
        auto cell = grid_neighbor(env_.width(), env_.height(), position,
                                  direction_heading(d));
        if (!cell) continue;
        auto s = memory_->stored_state(*cell);
        if (!s || *s == StateCode::Free) out.push_back(*cell);
    }
    return out;
}

DecisionOutcome Navigator::decision_phase() {
    auto slots = decision_window();

    // A fired command is obeyed for the goal or for the planned next cell.
    for (int j = 0; j < 4; ++j) {
        if (!slots[j].out_fired || !slots[j].cell) continue;
        const bool is_goal = slots[j].recalled == StateCode::Goal;
        const bool is_planned =
            state_.planned_next && *slots[j].cell == *state_.planned_next;
        if (!is_goal && !is_planned) continue;
        do_move(kSlotOrder[j]);
        return {state_.done ? DecisionOutcome::Kind::GoalReached
                            : DecisionOutcome::Kind::Move,
                kSlotOrder[j], 0};
    }

    // Nothing to follow: plan, or declare a dead end when nothing around is
    // open (everything obstacle, wall, dead-end, or already on the path).
    struct Candidate {
        int slot;
        int cell;
        bool unexplored;
    };
    std::vector<Candidate> candidates;
    for (int j = 0; j < 4; ++j) {
        if (!slots[j].cell) continue;
        const auto& s = slots[j].recalled;
        if (!s) candidates.push_back({j, *slots[j].cell, true});
        else if (*s == StateCode::Free) candidates.push_back({j, *slots[j].cell, false});
    }

    if (candidates.empty()) {
        state_.pose.heading = opposite(state_.pose.heading);  // turn around
        state_.mode = NavMode::Backtracking;
        return {DecisionOutcome::Kind::DeadEnd, Direction::Up, 0};
    }

    const bool any_unexplored =
        std::any_of(candidates.begin(), candidates.end(),
                    [](const Candidate& c) { return c.unexplored; });
    const Candidate* best = nullptr;
    for (const auto& c : candidates) {
        if (any_unexplored && !c.unexplored) continue;
        if (!best) {
            best = &c;
            continue;
        }
        const int dc = grid_manhattan(env_.width(), c.cell, env_.goal());
        const int db = grid_manhattan(env_.width(), best->cell, env_.goal());
        if (dc < db || (dc == db && kTiePriority[c.slot] < kTiePriority[best->slot]))
            best = &c;
    }

    write_state(best->cell, StateCode::StepInPath);
    write_state(state_.pose.position, candidates.size() >= 2
                                          ? StateCode::Crossroad
                                          : StateCode::StepInPath);
    state_.planned_next = best->cell;
    return {DecisionOutcome::Kind::Planned, Direction::Up, best->cell};
}

void Navigator::do_move(Direction d) {
    state_.predecessor = state_.pose.position;
    state_.pose = env_.apply_move(state_.pose, d);
    state_.planned_next.reset();
    path_.push_back(state_.pose.position);
    report_.trajectory.push_back(state_.pose.position);
    if (state_.pose.position == env_.goal()) state_.done = true;
}

void Navigator::backtrack_step() {
    if (path_.size() < 2) {
        fail("backtracked to the starting cell with nothing left to explore; "
             "the goal is unreachable");
        return;
    }
    const int current = path_.back();
    const int target = path_[path_.size() - 2];

    auto slots = decision_window();
    int target_slot = -1;
    for (int j = 0; j < 4; ++j)
        if (slots[j].cell && *slots[j].cell == target) target_slot = j;
    if (target_slot < 0) {
        fail("backtracking lost the previous path cell");
        return;
    }
    const auto& recalled = slots[target_slot].recalled;
    if (recalled != StateCode::StepInPath && recalled != StateCode::Crossroad) {
        fail("backtracking expected a path state behind; the map is corrupted");
        return;
    }
    assert(slots[target_slot].out_fired);

    state_.predecessor = current;
    state_.pose = env_.apply_move(state_.pose, kSlotOrder[target_slot]);
    path_.pop_back();
    report_.trajectory.push_back(target);

    // The departed cell leads nowhere.
    write_state(current, StateCode::DeadEnd);

    if (*recalled == StateCode::Crossroad) {
        const bool has_options = !plan_candidates(target).empty();
        write_state(target, StateCode::StepInPath);  // demoted either way
        if (has_options) state_.mode = NavMode::Normal;
    }
}

void Navigator::fail(const std::string& diagnostic) {
    failed_ = true;
    report_.diagnostic = diagnostic;
}

RunReport Navigator::run() {
    initialize();
    if (state_.done && state_.iteration == 0) state_.iteration = 1;  // start == goal
    const int cap = opts_.max_iterations > 0
                        ? opts_.max_iterations
                        : 10 * env_.width() * env_.height();

    while (!state_.done && !failed_) {
        ++state_.iteration;
        if (state_.iteration > cap) {
            fail("iteration cap exceeded; navigation livelock");
            state_.iteration = cap;
            break;
        }
        IterationRecord rec;
        rec.iteration = state_.iteration;
        rec.mode = state_.mode;
        rec.position = state_.pose.position;

        if (state_.mode == NavMode::Normal) {
            mapping_phase();
            const auto outcome = decision_phase();
            rec.outcome = outcome.kind;
            switch (outcome.kind) {
                case DecisionOutcome::Kind::Planned: {
                    std::ostringstream os;
                    os << "planned " << outcome.planned;
                    rec.detail = os.str();
                    break;
                }
                case DecisionOutcome::Kind::Move:
                case DecisionOutcome::Kind::GoalReached: {
                    std::ostringstream os;
                    os << "move " << direction_name(outcome.direction) << " to "
                       << state_.pose.position;
                    rec.detail = os.str();
                    break;
                }
                case DecisionOutcome::Kind::DeadEnd:
                    rec.detail = "dead-end, turning around";
                    break;
            }
        } else {
            backtrack_step();
            rec.outcome = DecisionOutcome::Kind::Move;
            std::ostringstream os;
            os << "backtrack to " << state_.pose.position;
            if (state_.mode == NavMode::Normal) os << ", resuming normal mode";
            rec.detail = os.str();
        }
        report_.log.push_back(rec);
    }

    report_.goal_reached = state_.done;
    report_.iterations = state_.iteration;
    if (!state_.done && report_.diagnostic.empty())
        report_.diagnostic = "navigation ended without reaching the goal";
    net_->run_until(memory_->next_free_tick());
    report_.final_map = memory_->map_dump();
    report_.spike_log_csv = net_->export_spike_log();
    return report_;
}

RunReport run_navigation(const GridEnv& env, NavigatorOptions options) {
    LocalEnvironment local(env);
    Navigator nav(local, options);
    return nav.run();
}

}  // namespace spikenav
