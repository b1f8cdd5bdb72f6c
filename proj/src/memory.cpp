#include "spikenav/memory.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace spikenav {

const char* state_name(StateCode s) {
    switch (s) {
        case StateCode::Start: return "start";
        case StateCode::Goal: return "goal";
        case StateCode::Unexplored: return "unexplored";
        case StateCode::StepInPath: return "step-in-path";
        case StateCode::Crossroad: return "crossroad";
        case StateCode::Free: return "free";
        case StateCode::Obstacle: return "obstacle";
        case StateCode::DeadEnd: return "dead-end";
    }
    return "?";
}

int MemoryConfig::cue_len() const {
    return std::bit_width(static_cast<unsigned>(grid_width * grid_height));
}

HippocampalMemory::HippocampalMemory(MemoryConfig config,
                                     std::vector<PopulationSpec>& populations,
                                     std::vector<SynapseGroupSpec>& synapses)
    : cfg_(config) {
    if (cfg_.grid_width < 1 || cfg_.grid_height < 1)
        throw std::invalid_argument("memory: bad grid dimensions");
    if (cfg_.num_states != 8)
        throw std::invalid_argument("memory: the state table has 8 entries");
    if (cfg_.forget_horizon < 0)
        throw std::invalid_argument("memory: forget_horizon must be >= 0");

    LifParams mem_params;  // defaults: rest -65, thresh -50, tau 5, refrac 1
    theta_ = mem_params.v_thresh - mem_params.v_rest;
    const int h = cfg_.forget_horizon;
    w_learn_ = h > 0 ? theta_ + (h - 1) * decay_step_ : theta_;
    w_cap_ = h > 0 ? theta_ + (2 * h - 1) * decay_step_ : theta_;

    cue_pop_ = populations.size();
    populations.push_back({"MemCue", static_cast<std::size_t>(cfg_.cue_len()),
                           mem_params, true});
    place_pop_ = populations.size();
    populations.push_back({"MemPlace", static_cast<std::size_t>(cfg_.cells()),
                           mem_params, true});
    content_pop_ = populations.size();
    populations.push_back({"MemCont", 8, mem_params, true});

    group_ = synapses.size();
    SynapseGroupSpec grp;
    grp.pre = "MemPlace";
    grp.post = "MemCont";
    grp.plastic = true;
    for (int p = 0; p < cfg_.cells(); ++p)
        for (int s = 0; s < 8; ++s)
            grp.connections.push_back({static_cast<std::size_t>(p),
                                       static_cast<std::size_t>(s), 0.0, 1});
    synapses.push_back(std::move(grp));

    weights_.assign(cfg_.cells(), {});
}

void HippocampalMemory::attach(Network& net) { net_ = &net; }

std::vector<bool> HippocampalMemory::encode_cue(int position) const {
    if (position < 1 || position > cfg_.cells())
        throw std::invalid_argument("encode_cue: position out of range");
    std::vector<bool> bits(cfg_.cue_len());
    for (int i = 0; i < cfg_.cue_len(); ++i)
        bits[i] = (position >> i) & 1;
    return bits;
}

double& HippocampalMemory::shadow(int position, int state) {
    return weights_[position - 1][state];
}

double HippocampalMemory::shadow(int position, int state) const {
    return weights_[position - 1][state];
}

void HippocampalMemory::require_idle(Tick t0) const {
    if (!net_) throw std::logic_error("memory not attached to a network");
    if (t0 < next_free_)
        throw std::invalid_argument("memory operation before the previous one settled");
    if (t0 < net_->now())
        throw std::invalid_argument("memory operation in the past");
}

void HippocampalMemory::inject_presentation(int position,
                                            std::optional<StateCode> state,
                                            Tick t) {
    std::vector<SpikeEvent> events;
    const auto bits = encode_cue(position);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) events.push_back({cue_pop_, i, t});
    events.push_back({place_pop_, static_cast<std::size_t>(position - 1), t});
    if (state)
        events.push_back({content_pop_, static_cast<std::size_t>(*state), t});
    net_->inject(events);
}

void HippocampalMemory::set_assoc(int position, int state, double w,
                                  Tick effective) {
    if (shadow(position, state) == w) return;
    shadow(position, state) = w;
    const std::size_t conn = static_cast<std::size_t>(position - 1) * 8 +
                             static_cast<std::size_t>(state);
    net_->schedule_weight_set(group_, conn, w, effective);
}

void HippocampalMemory::apply_decay_except(int position, Tick effective) {
    if (cfg_.forget_horizon == 0) return;
    for (int p = 1; p <= cfg_.cells(); ++p) {
        if (p == position) continue;
        for (int s = 0; s < 8; ++s) {
            const double w = shadow(p, s);
            if (w > 0.0) set_assoc(p, s, std::max(0.0, w - decay_step_), effective);
        }
    }
}

Tick HippocampalMemory::learn(int position, StateCode state, Tick t0,
                              bool late_third) {
    if (state == StateCode::Unexplored)
        throw std::invalid_argument("learn: the unexplored state is never written");
    const int s = static_cast<int>(state);
    if (s < 0 || s > 7) throw std::invalid_argument("learn: bad state");
    require_idle(t0);
    encode_cue(position);  // validates

    // Three presentations; the middle one lands in the refractory window.
    inject_presentation(position, state, t0);
    inject_presentation(position, state, t0 + 1);
    inject_presentation(position, state, late_third ? t0 + 3 : t0 + 2);

    // The old content (if any) still answers the first presentation one tick
    // in; from t0+2 the cue maps to the new content only.
    for (int other = 0; other < 8; ++other)
        if (other != s && shadow(position, other) > 0.0)
            set_assoc(position, other, 0.0, t0 + 2);
    set_assoc(position, s, w_learn_, t0 + 2);
    apply_decay_except(position, t0 + 2);

    next_free_ = t0 + kLearnDuration;
    return next_free_;
}

RecallHandle HippocampalMemory::recall(int position, Tick t0) {
    require_idle(t0);
    encode_cue(position);  // validates

    inject_presentation(position, std::nullopt, t0);

    RecallHandle h;
    h.position = position;
    h.cue_tick = t0;
    h.content_tick = t0 + 1;
    h.predicted = stored_state(position);

    if (h.predicted) {
        const int s = static_cast<int>(*h.predicted);
        if (cfg_.forget_horizon > 0) {
            const double boosted = std::min(
                w_cap_, shadow(position, s) + cfg_.forget_horizon * decay_step_);
            set_assoc(position, s, boosted, t0 + 2);
        }
    }
    apply_decay_except(position, t0 + 2);

    next_free_ = t0 + kRecallDuration;
    return h;
}

Tick HippocampalMemory::reinforce(int position, StateCode state, Tick t0,
                                  bool late_third) {
    learn(position, state, t0, late_third);
    recall(position, t0 + kLearnDuration);
    return t0 + kReinforceDuration;
}

std::optional<StateCode> HippocampalMemory::read_recall(const RecallHandle& h) const {
    if (!net_) throw std::logic_error("memory not attached to a network");
    if (net_->now() <= h.content_tick)
        throw std::logic_error("read_recall: network has not reached the content tick");
    std::optional<StateCode> result;
    for (const auto& ev : net_->spikes_at(h.content_tick)) {
        if (ev.population != content_pop_) continue;
        if (result)
            throw std::logic_error("read_recall: more than one content neuron fired");
        result = static_cast<StateCode>(ev.neuron);
    }
    return result;
}

std::optional<StateCode> HippocampalMemory::stored_state(int position) const {
    for (int s = 0; s < 8; ++s)
        if (shadow(position, s) >= theta_) return static_cast<StateCode>(s);
    return std::nullopt;
}

std::string HippocampalMemory::map_dump() const {
    std::ostringstream os;
    for (int p = 1; p <= cfg_.cells(); ++p)
        if (auto s = stored_state(p))
            os << p << ',' << static_cast<int>(*s) << ',' << state_name(*s) << '\n';
    return os.str();
}

}  // namespace spikenav
