#include "spikenav/gridworld.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikenav {

Heading opposite(Heading h) {
    switch (h) {
        case Heading::North: return Heading::South;
        case Heading::East: return Heading::West;
        case Heading::South: return Heading::North;
        case Heading::West: return Heading::East;
    }
    std::abort();
}

Heading turn_left(Heading h) {
    switch (h) {
        case Heading::North: return Heading::West;
        case Heading::West: return Heading::South;
        case Heading::South: return Heading::East;
        case Heading::East: return Heading::North;
    }
    std::abort();
}

Heading turn_right(Heading h) { return opposite(turn_left(h)); }

char heading_char(Heading h) {
    switch (h) {
        case Heading::North: return 'N';
        case Heading::East: return 'E';
        case Heading::South: return 'S';
        case Heading::West: return 'W';
    }
    std::abort();
}

Heading heading_from_char(char c) {
    switch (c) {
        case 'N': return Heading::North;
        case 'E': return Heading::East;
        case 'S': return Heading::South;
        case 'W': return Heading::West;
        default: throw std::invalid_argument(std::string("bad heading: ") + c);
    }
}

Heading direction_heading(Direction d) {
    switch (d) {
        case Direction::Up: return Heading::North;
        case Direction::Left: return Heading::West;
        case Direction::Down: return Heading::South;
        case Direction::Right: return Heading::East;
    }
    std::abort();
}

void GridEnv::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("env: bad dimensions");
    if (!on_grid(start)) throw std::invalid_argument("env: start off-grid");
    if (!on_grid(goal)) throw std::invalid_argument("env: goal off-grid");
    for (int p : obstacles)
        if (!on_grid(p)) throw std::invalid_argument("env: obstacle off-grid");
    if (obstacles.count(start)) throw std::invalid_argument("env: start inside obstacle");
    if (obstacles.count(goal)) throw std::invalid_argument("env: goal inside obstacle");
    if (start == goal) throw std::invalid_argument("env: start equals goal");
}

int GridEnv::manhattan(int a, int b) const {
    return std::abs(row(a) - row(b)) + std::abs(col(a) - col(b));
}

std::optional<int> neighbor(const GridEnv& env, int position, Heading dir) {
    if (!env.on_grid(position)) throw std::invalid_argument("neighbor: position off-grid");
    const int r = env.row(position), c = env.col(position);
    int nr = r, nc = c;
    switch (dir) {
        case Heading::North: nr = r - 1; break;
        case Heading::South: nr = r + 1; break;
        case Heading::East: nc = c + 1; break;
        case Heading::West: nc = c - 1; break;
    }
    if (nr < 0 || nr >= env.height || nc < 0 || nc >= env.width) return std::nullopt;
    return nr * env.width + nc + 1;
}

static CellObservation observe(const GridEnv& env, std::optional<int> cell) {
    CellObservation obs;
    obs.target = cell;
    if (!cell) {
        obs.kind = CellKind::Obstacle;  // walls read as blocked
    } else if (env.obstacles.count(*cell)) {
        obs.kind = CellKind::Obstacle;
    } else if (*cell == env.goal) {
        obs.kind = CellKind::Goal;
    } else {
        obs.kind = CellKind::Free;
    }
    return obs;
}

SenseResult sense(const GridEnv& env, const Pose& pose) {
    SenseResult r;
    r.right = observe(env, neighbor(env, pose.position, turn_right(pose.heading)));
    r.front = observe(env, neighbor(env, pose.position, pose.heading));
    r.left = observe(env, neighbor(env, pose.position, turn_left(pose.heading)));
    return r;
}

Pose apply_move(const GridEnv& env, const Pose& pose, Direction command) {
    const Heading h = direction_heading(command);
    auto target = neighbor(env, pose.position, h);
    if (!target) throw std::invalid_argument("apply_move: move off the grid");
    if (env.obstacles.count(*target))
        throw std::invalid_argument("apply_move: move into obstacle");
    return Pose{*target, h};
}

GridEnv parse_env_config(std::istream& in) {
    GridEnv env;
    bool have_start = false, have_goal = false;
    std::string line;
    while (std::getline(in, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "width") ls >> env.width;
        else if (key == "height") ls >> env.height;
        else if (key == "start") { ls >> env.start; have_start = true; }
        else if (key == "goal") { ls >> env.goal; have_goal = true; }
        else if (key == "obstacles") {
            int p;
            while (ls >> p) env.obstacles.insert(p);
        } else if (key == "initial_heading") {
            std::string h;
            ls >> h;
            if (h.empty()) throw std::invalid_argument("env config: missing heading");
            env.initial_heading = heading_from_char(h[0]);
        } else {
            throw std::invalid_argument("env config: unknown key '" + key + "'");
        }
    }
    if (!have_start || !have_goal)
        throw std::invalid_argument("env config: start and goal are required");
    env.validate();
    return env;
}

GridEnv load_env_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open environment config: " + path);
    return parse_env_config(f);
}

std::string serialize_env_config(const GridEnv& env) {
    std::ostringstream os;
    os << "width " << env.width << "\n";
    os << "height " << env.height << "\n";
    os << "obstacles";
    for (int p : env.obstacles) os << ' ' << p;
    os << "\n";
    os << "start " << env.start << "\n";
    os << "goal " << env.goal << "\n";
    os << "initial_heading " << heading_char(env.initial_heading) << "\n";
    return os.str();
}

}  // namespace spikenav
