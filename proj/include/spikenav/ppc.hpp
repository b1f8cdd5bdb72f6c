#pragma once

// Parietal decision circuit: a delayed propagation chain time-multiplexes
// candidate positions; a Match neuron fires only when its chain slot and a
// state-of-interest input coincide within one tick, and its index is the
// motor command. An inhibitory interneuron resets the circuit after the
// last slot.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spikenav/snn.hpp"

namespace spikenav {

struct PpcConfig {
    int num_commands = 4;
    int num_match_inputs = 2;
    Tick init_delay = 9;
    Tick step_delay = 7;

    void validate() const;
};

// Single suprathreshold drive; a coincidence input is subthreshold alone
// and suprathreshold in a same-tick pair.
inline constexpr double kPpcDrive = 30.0;
inline constexpr double kPpcCoincidence = 9.0;
inline constexpr double kPpcInhibition = -100.0;

class Ppc {
public:
    Ppc(PpcConfig config,
        std::vector<PopulationSpec>& populations,
        std::vector<SynapseGroupSpec>& synapses);

    void attach(Network& net);

    const PpcConfig& config() const { return cfg_; }

    // Tick arithmetic for a decision started by a Searching spike at t_s.
    Tick init_delay_tick(Tick t_s) const { return t_s + 1; }
    Tick delay_tick(Tick t_s, int slot) const {
        return t_s + 1 + cfg_.init_delay + slot * cfg_.step_delay;
    }
    Tick match_tick(Tick t_s, int slot) const { return delay_tick(t_s, slot) + 1; }
    Tick out_tick(Tick t_s, int slot) const { return delay_tick(t_s, slot) + 2; }
    Tick inh_tick(Tick t_s) const { return delay_tick(t_s, cfg_.num_commands - 1) + 1; }
    Tick window_end(Tick t_s) const { return out_tick(t_s, cfg_.num_commands - 1); }
    // A match-in spike at this tick lands on the given slot's coincidence.
    Tick aligned_input_tick(Tick t_s, int slot) const { return delay_tick(t_s, slot); }

    void inject_searching(Tick t_s);
    void inject_match_in(int input, Tick t);

    // Runs one full decision on the owned clock: injects the searching spike
    // and the scheduled match-in spikes, advances past the window, and
    // returns the first command the circuit selected, if any.
    std::optional<int> decide(Tick searching_tick,
                              const std::vector<std::pair<int, Tick>>& schedule);

    // OUT spikes of a window, as (slot, tick) sorted by tick.
    std::vector<std::pair<int, Tick>> outputs_in_window(Tick t_s) const;

    std::size_t searching_population() const { return searching_pop_; }
    std::size_t match_in_population() const { return match_in_pop_; }
    std::size_t out_population() const { return out_pop_; }

    std::size_t internal_neuron_count() const;

private:
    PpcConfig cfg_;
    Network* net_ = nullptr;
    std::size_t searching_pop_ = 0, match_in_pop_ = 0;
    std::size_t init_pop_ = 0, delay_pop_ = 0, match_pop_ = 0, inh_pop_ = 0,
                out_pop_ = 0;
};

// Wires content-population neurons onto the match-in lines, one line per
// source index, with a one-tick delay.
void connect_content_to_match_in(std::vector<SynapseGroupSpec>& synapses,
                                 const std::string& content_pop_id,
                                 const std::vector<int>& content_indices);

}  // namespace spikenav
