#pragma once

// Ground-truth grid environment. Positions are 1-based, row-major, rows
// increasing downward: id = row*width + col + 1.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

namespace spikenav {

enum class Heading { North, East, South, West };

Heading opposite(Heading h);
Heading turn_left(Heading h);
Heading turn_right(Heading h);
char heading_char(Heading h);
Heading heading_from_char(char c);

// Allocentric move directions; Up = North (decreasing row).
enum class Direction { Up, Left, Down, Right };
Heading direction_heading(Direction d);

struct Pose {
    int position = 1;
    Heading heading = Heading::South;
};

enum class CellKind { Free, Obstacle, Goal };

struct CellObservation {
    std::optional<int> target;  // absent for wall / off-grid
    CellKind kind = CellKind::Free;
};

struct SenseResult {
    CellObservation right, front, left;
};

struct GridEnv {
    int width = 1;
    int height = 1;
    std::set<int> obstacles;
    int start = 1;
    int goal = 1;
    Heading initial_heading = Heading::South;

    void validate() const;
    int cells() const { return width * height; }
    bool on_grid(int position) const { return position >= 1 && position <= cells(); }
    int row(int position) const { return (position - 1) / width; }
    int col(int position) const { return (position - 1) % width; }
    int manhattan(int a, int b) const;
};

std::optional<int> neighbor(const GridEnv& env, int position, Heading dir);
SenseResult sense(const GridEnv& env, const Pose& pose);
Pose apply_move(const GridEnv& env, const Pose& pose, Direction command);

GridEnv parse_env_config(std::istream& in);
GridEnv load_env_config(const std::string& path);
std::string serialize_env_config(const GridEnv& env);

}  // namespace spikenav
