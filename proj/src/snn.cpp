#include "spikenav/snn.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spikenav {

void LifParams::validate() const {
    if (!(v_thresh > v_rest)) throw std::invalid_argument("LifParams: v_thresh must exceed v_rest");
    if (!(v_reset <= v_rest)) throw std::invalid_argument("LifParams: v_reset must not exceed v_rest");
    if (!(tau_m > 0.0)) throw std::invalid_argument("LifParams: tau_m must be positive");
    if (t_refrac < 0) throw std::invalid_argument("LifParams: t_refrac must be >= 0");
}

Network::Network(std::vector<PopulationSpec> populations,
                 std::vector<SynapseGroupSpec> synapses)
    : pops_(std::move(populations)), groups_(std::move(synapses)) {
    for (std::size_t i = 0; i < pops_.size(); ++i) {
        const auto& p = pops_[i];
        if (p.size < 1) throw std::invalid_argument("population size must be >= 1");
        p.params.validate();
        if (!pop_index_.emplace(p.id, i).second)
            throw std::invalid_argument("duplicate population id: " + p.id);
        decay_.push_back(std::exp(-1.0 / p.params.tau_m));
    }
    neurons_.resize(pops_.size());
    outgoing_.resize(pops_.size());
    incoming_scan_ = false;
    for (std::size_t i = 0; i < pops_.size(); ++i) {
        neurons_[i].resize(pops_[i].size);
        outgoing_[i].resize(pops_[i].size);
    }
    incoming_.resize(pops_.size());
    for (std::size_t i = 0; i < pops_.size(); ++i) incoming_[i].resize(pops_[i].size);

    for (std::size_t g = 0; g < groups_.size(); ++g) {
        auto& grp = groups_[g];
        auto pre_it = pop_index_.find(grp.pre);
        auto post_it = pop_index_.find(grp.post);
        if (pre_it == pop_index_.end() || post_it == pop_index_.end())
            throw std::invalid_argument("synapse group references unknown population");
        const std::size_t pre = pre_it->second, post = post_it->second;
        if (grp.plastic && grp.rule && grp.rule->w_min > grp.rule->w_max)
            throw std::invalid_argument("StdpRule: w_min must not exceed w_max");
        for (std::size_t c = 0; c < grp.connections.size(); ++c) {
            const auto& con = grp.connections[c];
            if (con.pre >= pops_[pre].size || con.post >= pops_[post].size)
                throw std::invalid_argument("connection index out of range");
            if (con.delay < 1)
                throw std::invalid_argument("synaptic delay must be >= 1 tick");
            outgoing_[pre][con.pre].push_back({g, c});
            if (grp.plastic && grp.rule) {
                incoming_[post][con.post].push_back({g, c});
                incoming_scan_ = true;
            }
        }
        group_post_.push_back(post);
        group_pre_.push_back(pre);
        last_arrival_.emplace_back(grp.connections.size(), Tick{-1});
    }
}

std::size_t Network::population_index(const std::string& id) const {
    auto it = pop_index_.find(id);
    if (it == pop_index_.end()) throw std::invalid_argument("unknown population: " + id);
    return it->second;
}

const std::string& Network::population_id(std::size_t index) const {
    return pops_.at(index).id;
}

std::size_t Network::population_size(std::size_t index) const {
    return pops_.at(index).size;
}

void Network::inject(const std::vector<SpikeEvent>& events) {
    for (const auto& ev : events) {
        if (ev.population >= pops_.size() || ev.neuron >= pops_[ev.population].size)
            throw std::invalid_argument("inject: unknown target");
        if (!pops_[ev.population].input)
            throw std::invalid_argument("inject: population '" + pops_[ev.population].id +
                                        "' is not input-capable");
        if (ev.tick < now_)
            throw std::invalid_argument("inject: event in the past");
        injected_[ev.tick].push_back(ev);
    }
}

double Network::leak_to(std::size_t pop, Neuron& n, Tick t) const {
    if (t > n.updated) {
        n.v_offset *= std::pow(decay_[pop], static_cast<double>(t - n.updated));
        n.updated = t;
    }
    return n.v_offset;
}

void Network::record(const SpikeEvent& ev) {
    log_.push_back(ev);
    if (log_capacity_ > 0 && log_.size() > log_capacity_)
        log_.erase(log_.begin(), log_.begin() + (log_.size() - log_capacity_));
}

void Network::set_log_capacity(std::size_t capacity) { log_capacity_ = capacity; }

void Network::fire(std::size_t pop, std::size_t neuron, Tick t,
                   std::vector<SpikeEvent>& out) {
    auto& n = neurons_[pop][neuron];
    n.v_offset = pops_[pop].params.v_reset - pops_[pop].params.v_rest;
    n.updated = t;
    n.refrac_until = t + pops_[pop].params.t_refrac;
    n.last_spike = t;
    SpikeEvent ev{pop, neuron, t};
    record(ev);
    out.push_back(ev);

    // Potentiation: nearest preceding arrival on each plastic incoming synapse.
    if (incoming_scan_) {
        for (const auto& syn : incoming_[pop][neuron]) {
            const auto& rule = *groups_[syn.group].rule;
            const Tick arr = last_arrival_[syn.group][syn.index];
            if (arr >= 0 && arr <= t && t - arr <= rule.tau_plus) {
                auto& w = groups_[syn.group].connections[syn.index].weight;
                w = std::min(rule.w_max, w + rule.a_plus);
            }
        }
    }

    for (const auto& syn : outgoing_[pop][neuron]) {
        const auto& con = groups_[syn.group].connections[syn.index];
        pending_[t + con.delay].push_back(
            {group_post_[syn.group], con.post, syn});
    }
}

std::vector<SpikeEvent> Network::step() {
    std::vector<SpikeEvent> emitted;
    process_tick(now_, emitted);
    ++now_;
    return emitted;
}

void Network::run_until(Tick t) {
    std::vector<SpikeEvent> scratch;
    while (now_ < t) {
        Tick next = t;
        if (auto it = pending_.lower_bound(now_); it != pending_.end())
            next = std::min(next, it->first);
        if (auto it = injected_.lower_bound(now_); it != injected_.end())
            next = std::min(next, it->first);
        if (auto it = weight_sets_.lower_bound(now_); it != weight_sets_.end())
            next = std::min(next, it->first);
        if (next >= t) {
            now_ = t;
            return;
        }
        scratch.clear();
        process_tick(next, scratch);
        now_ = next + 1;
    }
}

void Network::process_tick(Tick t, std::vector<SpikeEvent>& emitted) {
    if (auto it = weight_sets_.find(t); it != weight_sets_.end()) {
        for (const auto& ws : it->second) {
            auto& grp = groups_[ws.group];
            grp.connections[ws.connection].weight = ws.w;
        }
        weight_sets_.erase(it);
    }

    std::set<std::pair<std::size_t, std::size_t>> touched;
    std::set<std::pair<std::size_t, std::size_t>> forced;

    if (auto it = pending_.find(t); it != pending_.end()) {
        for (const auto& arr : it->second) {
            auto& n = neurons_[arr.post_pop][arr.post_neuron];
            if (t <= n.refrac_until) continue;  // ignored during refractory
            leak_to(arr.post_pop, n, t);
            auto& grp = groups_[arr.syn.group];
            n.v_offset += grp.connections[arr.syn.index].weight;
            touched.insert({arr.post_pop, arr.post_neuron});
            if (grp.plastic && grp.rule) {
                last_arrival_[arr.syn.group][arr.syn.index] = t;
                const auto& rule = *grp.rule;
                if (n.last_spike >= 0 && n.last_spike < t &&
                    t - n.last_spike <= rule.tau_minus) {
                    auto& w = grp.connections[arr.syn.index].weight;
                    w = std::max(rule.w_min, w - rule.a_minus);
                }
            }
        }
        pending_.erase(it);
    }

    if (auto it = injected_.find(t); it != injected_.end()) {
        for (const auto& ev : it->second) {
            auto& n = neurons_[ev.population][ev.neuron];
            if (t <= n.refrac_until) continue;
            forced.insert({ev.population, ev.neuron});
            touched.insert({ev.population, ev.neuron});
        }
        injected_.erase(it);
    }

    for (const auto& [pop, neuron] : touched) {
        auto& n = neurons_[pop][neuron];
        if (t <= n.refrac_until) continue;
        if (forced.count({pop, neuron})) {
            fire(pop, neuron, t, emitted);
            continue;
        }
        const auto& p = pops_[pop].params;
        if (p.v_rest + n.v_offset >= p.v_thresh) fire(pop, neuron, t, emitted);
    }
}

std::vector<SpikeEvent> Network::spikes_between(Tick t0, Tick t1) const {
    if (t0 > t1) throw std::invalid_argument("spikes_between: inverted range");
    if (t1 > now_) throw std::invalid_argument("spikes_between: range beyond current tick");
    // The log is appended in processing order, so ticks are nondecreasing.
    auto lo = std::lower_bound(log_.begin(), log_.end(), t0,
                               [](const SpikeEvent& ev, Tick t) { return ev.tick < t; });
    auto hi = std::upper_bound(lo, log_.end(), t1,
                               [](Tick t, const SpikeEvent& ev) { return t < ev.tick; });
    std::vector<SpikeEvent> out(lo, hi);
    std::sort(out.begin(), out.end(), [](const SpikeEvent& a, const SpikeEvent& b) {
        return std::tie(a.tick, a.population, a.neuron) <
               std::tie(b.tick, b.population, b.neuron);
    });
    return out;
}

std::vector<SpikeEvent> Network::spikes_at(Tick t) const {
    auto lo = std::lower_bound(log_.begin(), log_.end(), t,
                               [](const SpikeEvent& ev, Tick tt) { return ev.tick < tt; });
    auto hi = std::upper_bound(lo, log_.end(), t,
                               [](Tick tt, const SpikeEvent& ev) { return tt < ev.tick; });
    return {lo, hi};
}

double Network::weight(std::size_t group, std::size_t connection) const {
    return groups_.at(group).connections.at(connection).weight;
}

void Network::set_weight(std::size_t group, std::size_t connection, double w) {
    auto& grp = groups_.at(group);
    if (!grp.plastic) throw std::invalid_argument("set_weight: group is not plastic");
    grp.connections.at(connection).weight = w;
}

void Network::schedule_weight_set(std::size_t group, std::size_t connection,
                                  double w, Tick at) {
    auto& grp = groups_.at(group);
    if (!grp.plastic) throw std::invalid_argument("schedule_weight_set: group is not plastic");
    if (connection >= grp.connections.size())
        throw std::invalid_argument("schedule_weight_set: bad connection index");
    if (at < now_) throw std::invalid_argument("schedule_weight_set: tick in the past");
    weight_sets_[at].push_back({group, connection, w});
}

const SynapseGroupSpec& Network::group_spec(std::size_t group) const {
    return groups_.at(group);
}

double Network::membrane(std::size_t population, std::size_t neuron) const {
    const auto& n = neurons_.at(population).at(neuron);
    const auto& p = pops_[population].params;
    double off = n.v_offset;
    if (now_ > n.updated)
        off *= std::pow(decay_[population], static_cast<double>(now_ - n.updated));
    return p.v_rest + off;
}

std::string Network::export_spike_log() const {
    auto events = log_;
    std::sort(events.begin(), events.end(),
              [](const SpikeEvent& a, const SpikeEvent& b) {
                  return std::tie(a.tick, a.population, a.neuron) <
                         std::tie(b.tick, b.population, b.neuron);
              });
    std::ostringstream os;
    for (const auto& ev : events)
        os << ev.tick << ',' << pops_[ev.population].id << ',' << ev.neuron << '\n';
    return os.str();
}

}  // namespace spikenav
