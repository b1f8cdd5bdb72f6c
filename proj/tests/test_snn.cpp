#include <doctest.h>

#include <cmath>
#include <random>

#include "spikenav/snn.hpp"

using namespace spikenav;

namespace {

Network single_neuron_net(double weight, Tick delay = 1, LifParams params = {}) {
    std::vector<PopulationSpec> pops = {
        {"in", 1, {}, true},
        {"cell", 1, params, false},
    };
    std::vector<SynapseGroupSpec> syns;
    SynapseGroupSpec g;
    g.pre = "in";
    g.post = "cell";
    g.connections = {{0, 0, weight, delay}};
    syns.push_back(g);
    return Network(std::move(pops), std::move(syns));
}

// Reference discrete integration of the same update equation.
Tick first_spike_oracle(const LifParams& p, double input_per_tick, Tick first_arrival) {
    const double k = std::exp(-1.0 / p.tau_m);
    double v = p.v_rest;
    Tick t = first_arrival;
    for (;; ++t) {
        v = p.v_rest + (v - p.v_rest) * k + input_per_tick;
        if (v >= p.v_thresh) return t;
        if (t > first_arrival + 100000) FAIL("oracle found no spike");
    }
}

}  // namespace

TEST_CASE("empty network is valid and stepping is a no-op") {
    Network net({}, {});
    for (int i = 0; i < 100; ++i) CHECK(net.step().empty());
    CHECK(net.now() == 100);
}

TEST_CASE("build errors") {
    LifParams p;
    SUBCASE("delay 0 rejected") {
        std::vector<PopulationSpec> pops = {{"a", 1, p, true}};
        SynapseGroupSpec g;
        g.pre = "a";
        g.post = "a";
        g.connections = {{0, 0, 1.0, 0}};
        CHECK_THROWS_AS(Network(std::move(pops), {g}), std::invalid_argument);
    }
    SUBCASE("unknown population id rejected") {
        std::vector<PopulationSpec> pops = {{"a", 1, p, true}};
        SynapseGroupSpec g;
        g.pre = "a";
        g.post = "missing";
        g.connections = {{0, 0, 1.0, 1}};
        CHECK_THROWS_AS(Network(std::move(pops), {g}), std::invalid_argument);
    }
    SUBCASE("out-of-range neuron index rejected") {
        std::vector<PopulationSpec> pops = {{"a", 2, p, true}};
        SynapseGroupSpec g;
        g.pre = "a";
        g.post = "a";
        g.connections = {{0, 2, 1.0, 1}};
        CHECK_THROWS_AS(Network(std::move(pops), {g}), std::invalid_argument);
    }
    SUBCASE("bad LIF parameters rejected") {
        LifParams bad;
        bad.v_thresh = bad.v_rest - 1.0;
        CHECK_THROWS_AS(Network({{"a", 1, bad, true}}, {}), std::invalid_argument);
    }
}

TEST_CASE("injection rules") {
    Network net = single_neuron_net(30.0);
    net.run_until(5);
    SUBCASE("past event rejected") {
        CHECK_THROWS_AS(net.inject({{0, 0, 4}}), std::invalid_argument);
    }
    SUBCASE("non-input population rejected") {
        CHECK_THROWS_AS(net.inject({{1, 0, 6}}), std::invalid_argument);
    }
    SUBCASE("unknown target rejected") {
        CHECK_THROWS_AS(net.inject({{7, 0, 6}}), std::invalid_argument);
    }
    SUBCASE("inject at the current tick is delivered this tick") {
        net.inject({{0, 0, 5}});
        auto spikes = net.step();
        REQUIRE(spikes.size() == 1);
        CHECK(spikes[0] == SpikeEvent{0, 0, 5});
    }
}

TEST_CASE("quiescence: no input means no spikes and a resting membrane") {
    Network net = single_neuron_net(30.0);
    net.run_until(100);
    CHECK(net.spike_log().empty());
    CHECK(net.membrane(1, 0) == doctest::Approx(-65.0));
}

TEST_CASE("delay exactness: a spike at t arrives at t+d, never earlier or later") {
    for (Tick d : {1, 3, 7, 19}) {
        Network net = single_neuron_net(30.0, d);
        net.inject({{0, 0, 10}});
        net.run_until(10 + d + 5);
        std::vector<SpikeEvent> cell_spikes;
        for (const auto& ev : net.spike_log())
            if (ev.population == 1) cell_spikes.push_back(ev);
        REQUIRE(cell_spikes.size() == 1);
        CHECK(cell_spikes[0].tick == 10 + d);
    }
}

TEST_CASE("constant per-tick input: first spike matches the scalar oracle") {
    LifParams p;
    for (double input : {3.0, 4.5, 7.9}) {
        Network net = single_neuron_net(input);
        // Drive the input line every tick; arrivals start one tick later.
        std::vector<SpikeEvent> events;
        for (Tick t = 0; t < 60; ++t) events.push_back({0, 0, t});
        net.inject(events);
        net.run_until(80);
        std::optional<Tick> first;
        for (const auto& ev : net.spike_log())
            if (ev.population == 1 && !first) first = ev.tick;
        REQUIRE(first.has_value());
        CHECK(*first == first_spike_oracle(p, input, 1));
    }
}

TEST_CASE("leak decays toward rest by exp(-1/tau) per tick") {
    LifParams p;
    Network net = single_neuron_net(8.0);  // subthreshold
    net.inject({{0, 0, 4}});               // arrival at tick 5
    const double k = std::exp(-1.0 / p.tau_m);
    for (Tick steps : {1, 2, 5, 17, 40}) {
        net.run_until(5 + steps);
        const double expected = p.v_rest + 8.0 * std::pow(k, steps - 1);
        CHECK(net.membrane(1, 0) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("refractory period") {
    SUBCASE("suprathreshold input during refractory is ignored") {
        Network net = single_neuron_net(30.0);
        net.inject({{0, 0, 5}, {0, 0, 6}});  // arrivals at 6 and 7
        net.run_until(20);
        std::vector<Tick> ticks;
        for (const auto& ev : net.spike_log())
            if (ev.population == 1) ticks.push_back(ev.tick);
        REQUIRE(ticks.size() == 1);  // second arrival lands inside refractory
        CHECK(ticks[0] == 6);
    }
    SUBCASE("forced injection during refractory is swallowed") {
        std::vector<PopulationSpec> pops = {{"in", 1, {}, true}};
        Network net(std::move(pops), {});
        net.inject({{0, 0, 3}, {0, 0, 4}, {0, 0, 5}});
        net.run_until(10);
        std::vector<Tick> ticks;
        for (const auto& ev : net.spike_log()) ticks.push_back(ev.tick);
        CHECK(ticks == std::vector<Tick>{3, 5});
    }
    SUBCASE("consecutive spikes differ by more than t_refrac") {
        LifParams p;
        p.t_refrac = 3;
        std::vector<PopulationSpec> pops = {{"in", 1, p, true}};
        Network net(std::move(pops), {});
        std::vector<SpikeEvent> events;
        for (Tick t = 0; t < 50; ++t) events.push_back({0, 0, t});
        net.inject(events);
        net.run_until(60);
        Tick last = -100;
        for (const auto& ev : net.spike_log()) {
            CHECK(ev.tick - last > p.t_refrac);
            last = ev.tick;
        }
    }
}

TEST_CASE("determinism: identical builds and injections give identical logs") {
    auto build_and_run = [] {
        LifParams p;
        std::vector<PopulationSpec> pops = {{"in", 4, p, true}, {"mid", 6, p, false}};
        std::vector<SynapseGroupSpec> syns;
        SynapseGroupSpec g;
        g.pre = "in";
        g.post = "mid";
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> w(2.0, 12.0);
        std::uniform_int_distribution<Tick> d(1, 6);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 6; ++j)
                g.connections.push_back({i, j, w(rng), d(rng)});
        syns.push_back(g);
        Network net(std::move(pops), std::move(syns));
        std::mt19937 rng2(7);
        std::uniform_int_distribution<Tick> tick(0, 200);
        std::uniform_int_distribution<std::size_t> neuron(0, 3);
        std::vector<SpikeEvent> events;
        for (int i = 0; i < 150; ++i) events.push_back({0, neuron(rng2), tick(rng2)});
        net.inject(events);
        net.run_until(260);
        return net.export_spike_log();
    };
    CHECK(build_and_run() == build_and_run());
}

TEST_CASE("spikes_between") {
    Network net = single_neuron_net(30.0);
    SUBCASE("empty simulation gives an empty list") {
        net.run_until(10);
        CHECK(net.spikes_between(0, 10).empty());
    }
    SUBCASE("point query returns exactly one tick's events") {
        net.inject({{0, 0, 3}, {0, 0, 8}});
        net.run_until(20);
        auto at3 = net.spikes_between(3, 3);
        REQUIRE(at3.size() == 1);
        CHECK(at3[0].tick == 3);
        auto all = net.spikes_between(0, 20);
        CHECK(all.size() == 4);  // two injected, two downstream
    }
    SUBCASE("inverted range rejected") {
        net.run_until(10);
        CHECK_THROWS_AS(net.spikes_between(5, 4), std::invalid_argument);
    }
}

TEST_CASE("stdp pairing follows the additive nearest-neighbor rule") {
    StdpRule rule;
    rule.a_plus = 0.5;
    rule.a_minus = 0.3;
    rule.tau_plus = 20;
    rule.tau_minus = 20;
    rule.w_min = 0.0;
    rule.w_max = 5.0;

    auto build = [&rule](double w0) {
        std::vector<PopulationSpec> pops = {{"pre", 1, {}, true},
                                            {"post", 1, {}, true}};
        SynapseGroupSpec g;
        g.pre = "pre";
        g.post = "post";
        g.connections = {{0, 0, w0, 1}};
        g.plastic = true;
        g.rule = rule;
        return Network(std::move(pops), {g});
    };

    SUBCASE("pre before (or with) post potentiates") {
        Network net = build(1.0);
        net.inject({{0, 0, 10}, {1, 0, 11}});  // arrival and fire both at 11
        net.run_until(15);
        CHECK(net.weight(0, 0) == doctest::Approx(1.5));
    }
    SUBCASE("post before pre depresses") {
        Network net = build(1.0);
        net.inject({{1, 0, 10}, {0, 0, 14}});  // arrival at 15, post fired at 10
        net.run_until(20);
        CHECK(net.weight(0, 0) == doctest::Approx(0.7));
    }
    SUBCASE("pairs outside the window leave the weight alone") {
        Network net = build(1.0);
        net.inject({{1, 0, 10}, {0, 0, 50}});
        net.run_until(60);
        CHECK(net.weight(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("weights stay inside [w_min, w_max] under any spike storm") {
        Network net = build(4.9);
        std::mt19937 rng(3);
        std::uniform_int_distribution<Tick> tick(0, 400);
        std::uniform_int_distribution<int> pop(0, 1);
        std::vector<SpikeEvent> events;
        for (int i = 0; i < 300; ++i)
            events.push_back({static_cast<std::size_t>(pop(rng)), 0, tick(rng)});
        net.inject(events);
        net.run_until(420);
        CHECK(net.weight(0, 0) >= rule.w_min);
        CHECK(net.weight(0, 0) <= rule.w_max);
    }
}

TEST_CASE("spike log capacity keeps the most recent events") {
    std::vector<PopulationSpec> pops = {{"in", 1, {}, true}};
    Network net(std::move(pops), {});
    net.set_log_capacity(3);
    net.inject({{0, 0, 0}, {0, 0, 2}, {0, 0, 4}, {0, 0, 6}, {0, 0, 8}});
    net.run_until(10);
    REQUIRE(net.spike_log().size() == 3);
    CHECK(net.spike_log().front().tick == 4);
    CHECK(net.spike_log().back().tick == 8);
}

TEST_CASE("export format is tick,population,neuron") {
    Network net = single_neuron_net(30.0);
    net.inject({{0, 0, 2}});
    net.run_until(5);
    CHECK(net.export_spike_log() == "2,in,0\n3,cell,0\n");
}
