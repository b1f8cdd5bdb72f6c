#include "spikenav/ppc.hpp"

#include <stdexcept>

namespace spikenav {

void PpcConfig::validate() const {
    if (num_commands < 1) throw std::invalid_argument("ppc: num_commands must be >= 1");
    if (num_match_inputs < 1)
        throw std::invalid_argument("ppc: num_match_inputs must be >= 1");
    if (init_delay < 1) throw std::invalid_argument("ppc: init_delay must be >= 1");
    if (step_delay < 1) throw std::invalid_argument("ppc: step_delay must be >= 1");
}

Ppc::Ppc(PpcConfig config, std::vector<PopulationSpec>& populations,
         std::vector<SynapseGroupSpec>& synapses)
    : cfg_(config) {
    cfg_.validate();

    LifParams drive_params;  // rest -65, thresh -50, tau 5, refrac 1
    LifParams match_params = drive_params;
    match_params.tau_m = 2.0;  // residue of a lone input dies before the next tick

    const auto n = static_cast<std::size_t>(cfg_.num_commands);
    searching_pop_ = populations.size();
    populations.push_back({"INsearchingPPC", 1, drive_params, true});
    match_in_pop_ = populations.size();
    populations.push_back({"INmatchPPC",
                           static_cast<std::size_t>(cfg_.num_match_inputs),
                           drive_params, true});
    init_pop_ = populations.size();
    populations.push_back({"InitDelay", 1, drive_params, false});
    delay_pop_ = populations.size();
    populations.push_back({"Delay", n, drive_params, false});
    match_pop_ = populations.size();
    populations.push_back({"Match", n, match_params, false});
    inh_pop_ = populations.size();
    populations.push_back({"Inh", 1, drive_params, false});
    out_pop_ = populations.size();
    populations.push_back({"OUT", n, drive_params, false});

    auto add = [&synapses](const std::string& pre, const std::string& post,
                           std::vector<Connection> cons) {
        SynapseGroupSpec g;
        g.pre = pre;
        g.post = post;
        g.connections = std::move(cons);
        synapses.push_back(std::move(g));
    };

    add("INsearchingPPC", "InitDelay", {{0, 0, kPpcDrive, 1}});
    add("InitDelay", "Delay", {{0, 0, kPpcDrive, cfg_.init_delay}});

    std::vector<Connection> chain;
    for (std::size_t j = 0; j + 1 < n; ++j)
        chain.push_back({j, j + 1, kPpcDrive, cfg_.step_delay});
    if (!chain.empty()) add("Delay", "Delay", std::move(chain));

    std::vector<Connection> select;
    for (std::size_t j = 0; j < n; ++j)
        select.push_back({j, j, kPpcCoincidence, 1});
    add("Delay", "Match", std::move(select));

    std::vector<Connection> inputs;
    for (std::size_t i = 0; i < static_cast<std::size_t>(cfg_.num_match_inputs); ++i)
        for (std::size_t j = 0; j < n; ++j)
            inputs.push_back({i, j, kPpcCoincidence, 1});
    add("INmatchPPC", "Match", std::move(inputs));

    add("Delay", "Inh", {{n - 1, 0, kPpcDrive, 1}});

    std::vector<Connection> inhibit;
    for (std::size_t j = 0; j < n; ++j)
        inhibit.push_back({0, j, kPpcInhibition, 1});
    add("Inh", "Match", std::move(inhibit));

    std::vector<Connection> outs;
    for (std::size_t j = 0; j < n; ++j)
        outs.push_back({j, j, kPpcDrive, 1});
    add("Match", "OUT", std::move(outs));
}

void Ppc::attach(Network& net) { net_ = &net; }

std::size_t Ppc::internal_neuron_count() const {
    return 1 + 2 * static_cast<std::size_t>(cfg_.num_commands) + 1;
}

void Ppc::inject_searching(Tick t_s) {
    if (!net_) throw std::logic_error("ppc not attached to a network");
    net_->inject({{searching_pop_, 0, t_s}});
}

void Ppc::inject_match_in(int input, Tick t) {
    if (!net_) throw std::logic_error("ppc not attached to a network");
    if (input < 0 || input >= cfg_.num_match_inputs)
        throw std::invalid_argument("ppc: bad match-in line");
    net_->inject({{match_in_pop_, static_cast<std::size_t>(input), t}});
}

std::optional<int> Ppc::decide(Tick searching_tick,
                               const std::vector<std::pair<int, Tick>>& schedule) {
    if (!net_) throw std::logic_error("ppc not attached to a network");
    for (const auto& [input, t] : schedule)
        if (t <= searching_tick)
            throw std::invalid_argument("ppc: schedule tick must follow the searching spike");

    inject_searching(searching_tick);
    for (const auto& [input, t] : schedule) inject_match_in(input, t);
    net_->run_until(window_end(searching_tick) + 1);

    auto outs = outputs_in_window(searching_tick);
    if (outs.empty()) return std::nullopt;
    return outs.front().first;
}

std::vector<std::pair<int, Tick>> Ppc::outputs_in_window(Tick t_s) const {
    if (!net_) throw std::logic_error("ppc not attached to a network");
    std::vector<std::pair<int, Tick>> outs;
    for (const auto& ev : net_->spikes_between(t_s, window_end(t_s)))
        if (ev.population == out_pop_)
            outs.push_back({static_cast<int>(ev.neuron), ev.tick});
    return outs;
}

void connect_content_to_match_in(std::vector<SynapseGroupSpec>& synapses,
                                 const std::string& content_pop_id,
                                 const std::vector<int>& content_indices) {
    SynapseGroupSpec g;
    g.pre = content_pop_id;
    g.post = "INmatchPPC";
    for (std::size_t line = 0; line < content_indices.size(); ++line)
        g.connections.push_back({static_cast<std::size_t>(content_indices[line]),
                                 line, kPpcDrive, 1});
    synapses.push_back(std::move(g));
}

}  // namespace spikenav
