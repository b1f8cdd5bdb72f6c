#pragma once

// Spiking short-term associative memory over snn populations: binary
// position cue + one-hot place layer driving an 8-state content population
// through plastic synapses. Learning sets the cue->content drive above the
// recall threshold; every operation weakens associations it does not touch
// (operation-counted forgetting), and a learn over an existing cue forgets
// the previous content first.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spikenav/snn.hpp"

namespace spikenav {

enum class StateCode : int {
    Start = 0,
    Goal = 1,
    Unexplored = 2,  // represented by absence; never written
    StepInPath = 3,
    Crossroad = 4,
    Free = 5,
    Obstacle = 6,
    DeadEnd = 7,
};

const char* state_name(StateCode s);

struct MemoryConfig {
    int grid_width = 4;
    int grid_height = 4;
    int num_states = 8;
    // Operations an untouched association survives after a plain learn.
    // 0 disables forgetting entirely.
    int forget_horizon = 50;

    int cue_len() const;
    int cells() const { return grid_width * grid_height; }
    int mem_size() const { return num_states + cue_len(); }
};

// Memory operation timing (ticks): the three learn presentations occupy
// [t0, t0+3]; each operation ends with a 30-tick guard gap before the next
// may start. A reinforce is a learn whose recall starts 34 ticks in.
inline constexpr Tick kMemoryGuardGap = 30;
inline constexpr Tick kLearnSpan = 4;
inline constexpr Tick kRecallSpan = 1;
inline constexpr Tick kLearnDuration = kLearnSpan + kMemoryGuardGap;    // 34
inline constexpr Tick kRecallDuration = kRecallSpan + kMemoryGuardGap;  // 31
inline constexpr Tick kReinforceDuration = kLearnDuration + kRecallDuration;

struct RecallHandle {
    int position = 0;
    Tick cue_tick = 0;
    Tick content_tick = 0;  // cue_tick + 1
    std::optional<StateCode> predicted;
};

class HippocampalMemory {
public:
    // Adds the memory populations and the plastic synapse group to the
    // builder lists; attach() must be called once the network is built.
    HippocampalMemory(MemoryConfig config,
                      std::vector<PopulationSpec>& populations,
                      std::vector<SynapseGroupSpec>& synapses);

    void attach(Network& net);

    const MemoryConfig& config() const { return cfg_; }

    // Bit i set means cue neuron i fires; standard binary encoding of the
    // 1-based position id.
    std::vector<bool> encode_cue(int position) const;

    Tick learn(int position, StateCode state, Tick t0, bool late_third = false);
    RecallHandle recall(int position, Tick t0);
    Tick reinforce(int position, StateCode state, Tick t0, bool late_third = false);

    // Spiking readout: content spikes observed at the handle's content tick.
    // The network must have advanced past that tick.
    std::optional<StateCode> read_recall(const RecallHandle& h) const;

    // State an idle recall would return right now, from the stored weights.
    std::optional<StateCode> stored_state(int position) const;

    Tick next_free_tick() const { return next_free_; }

    std::size_t cue_population() const { return cue_pop_; }
    std::size_t place_population() const { return place_pop_; }
    std::size_t content_population() const { return content_pop_; }

    // `position,state_index,state_name` for all recallable associations,
    // row-major order.
    std::string map_dump() const;

private:
    void require_idle(Tick t0) const;
    void inject_presentation(int position, std::optional<StateCode> state, Tick t);
    void apply_decay_except(int position, Tick effective);
    void set_assoc(int position, int state, double w, Tick effective);
    double& shadow(int position, int state);
    double shadow(int position, int state) const;

    MemoryConfig cfg_;
    Network* net_ = nullptr;
    std::size_t cue_pop_ = 0, place_pop_ = 0, content_pop_ = 0;
    std::size_t group_ = 0;  // plastic place->content group index

    double theta_ = 15.0;  // recall threshold drive (v_thresh - v_rest)
    double decay_step_ = 0.25;
    double w_learn_ = 0.0;
    double w_cap_ = 0.0;

    std::vector<std::array<double, 8>> weights_;  // shadow of the plastic group
    Tick next_free_ = 0;
};

}  // namespace spikenav
