#pragma once

// Deterministic discrete-time simulator for populations of LIF neurons
// connected by delayed synapses. Time advances in integer 1 ms ticks.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spikenav {

using Tick = std::int64_t;

struct LifParams {
    double v_rest = -65.0;    // mV
    double v_reset = -65.0;   // mV
    double v_thresh = -50.0;  // mV
    double tau_m = 5.0;       // ms
    Tick t_refrac = 1;        // ms, >= 0

    void validate() const;
};

struct PopulationSpec {
    std::string id;
    std::size_t size = 1;
    LifParams params;
    bool input = false;  // accepts injected events
};

struct Connection {
    std::size_t pre = 0;
    std::size_t post = 0;
    double weight = 0.0;  // membrane increment on arrival, may be negative
    Tick delay = 1;       // >= 1
};

struct StdpRule {
    double a_plus = 0.0;
    double a_minus = 0.0;
    Tick tau_plus = 20;
    Tick tau_minus = 20;
    double w_min = 0.0;
    double w_max = 1.0;
};

struct SynapseGroupSpec {
    std::string pre;
    std::string post;
    std::vector<Connection> connections;
    bool plastic = false;
    std::optional<StdpRule> rule;  // only meaningful when plastic
};

struct SpikeEvent {
    std::size_t population = 0;  // population index in build order
    std::size_t neuron = 0;
    Tick tick = 0;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
    friend auto operator<=>(const SpikeEvent&, const SpikeEvent&) = default;
};

// One network instance. Stepped by a single caller at a time; independent
// instances may run in parallel.
class Network {
public:
    Network(std::vector<PopulationSpec> populations,
            std::vector<SynapseGroupSpec> synapses);

    Tick now() const { return now_; }

    std::size_t population_index(const std::string& id) const;
    const std::string& population_id(std::size_t index) const;
    std::size_t population_count() const { return pops_.size(); }
    std::size_t population_size(std::size_t index) const;

    // Queue events for delivery. An injected event makes the target neuron
    // fire at that tick unless it is refractory then.
    void inject(const std::vector<SpikeEvent>& events);

    // Advance exactly one tick; returns the spikes emitted during it.
    std::vector<SpikeEvent> step();

    // Advance until now() == t.
    void run_until(Tick t);

    // Recorded events in [t0, t1], ordered by (tick, population, neuron).
    std::vector<SpikeEvent> spikes_between(Tick t0, Tick t1) const;

    // Recorded events of a single tick, in emission order.
    std::vector<SpikeEvent> spikes_at(Tick t) const;

    const std::vector<SpikeEvent>& spike_log() const { return log_; }

    // Keep at most `capacity` most recent events (0 = unbounded, default).
    void set_log_capacity(std::size_t capacity);

    // Plastic weight access for module-level learning rules.
    double weight(std::size_t group, std::size_t connection) const;
    void set_weight(std::size_t group, std::size_t connection, double w);
    // Applied at the start of the given tick, before arrivals integrate.
    void schedule_weight_set(std::size_t group, std::size_t connection,
                             double w, Tick at);
    std::size_t group_count() const { return groups_.size(); }
    const SynapseGroupSpec& group_spec(std::size_t group) const;

    double membrane(std::size_t population, std::size_t neuron) const;

    // CSV export, one `tick,population,neuron` line per event.
    std::string export_spike_log() const;

private:
    struct Neuron {
        double v_offset = 0.0;     // v - v_rest at `updated`
        Tick updated = 0;
        Tick refrac_until = -1;    // refractory through this tick inclusive
        Tick last_spike = -1;
    };

    struct Synapse {
        std::size_t group;
        std::size_t index;  // connection index within group
    };

    struct Arrival {
        std::size_t post_pop;
        std::size_t post_neuron;
        Synapse syn;
    };

    struct WeightSet {
        std::size_t group;
        std::size_t connection;
        double w;
    };

    void process_tick(Tick t, std::vector<SpikeEvent>& emitted);
    void fire(std::size_t pop, std::size_t neuron, Tick t,
              std::vector<SpikeEvent>& out);
    double leak_to(std::size_t pop, Neuron& n, Tick t) const;
    void record(const SpikeEvent& ev);

    std::vector<PopulationSpec> pops_;
    std::map<std::string, std::size_t> pop_index_;
    std::vector<SynapseGroupSpec> groups_;
    std::vector<std::size_t> group_pre_;
    std::vector<std::size_t> group_post_;
    std::vector<std::vector<Tick>> last_arrival_;  // per plastic connection
    std::vector<double> decay_;  // exp(-1/tau_m) per population

    std::vector<std::vector<Neuron>> neurons_;
    // outgoing_[pop][neuron] -> synapses
    std::vector<std::vector<std::vector<Synapse>>> outgoing_;
    std::vector<std::vector<std::vector<Synapse>>> incoming_;  // plastic only
    bool incoming_scan_ = false;

    std::map<Tick, std::vector<Arrival>> pending_;
    std::map<Tick, std::vector<SpikeEvent>> injected_;
    std::map<Tick, std::vector<WeightSet>> weight_sets_;

    std::vector<SpikeEvent> log_;
    std::size_t log_capacity_ = 0;
    Tick now_ = 0;
};

}  // namespace spikenav
