#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "clachar/dynamic_mapper.hpp"
#include "clachar/sim_engine.hpp"

using namespace clachar;

namespace {

constexpr double kR = 10e3;
constexpr double kC = 1e-15;
constexpr double kVdd = 0.9;

// Netlist with equal n and p resistance and no leakage.
DynamicNetlist bare_netlist() {
  DynamicNetlist nl;
  nl.flavor = Flavor::Si;
  nl.vdd_v = kVdd;
  nl.devices.emplace(DeviceKind::SiN, DeviceParams{DeviceKind::SiN, 0.3, kR, 1e-17, 0.0});
  nl.devices.emplace(DeviceKind::SiP, DeviceParams{DeviceKind::SiP, 0.3, kR, 1e-17, 0.0});
  return nl;
}

// a -> k inverters; every node has capacitance kC.
DynamicNetlist inverter_chain(int k) {
  auto nl = bare_netlist();
  NodeId prev = nl.add_node("a", NodeRole::Input);
  nl.inputs.push_back(prev);
  for (int i = 0; i < k; ++i) {
    const NodeId out = nl.add_node("y" + std::to_string(i), NodeRole::Static);
    nl.stages.push_back(DynamicStage{StageType::StaticInv, SwitchGraph::leaf({DeviceKind::SiN, prev, false}), out,
                                     ClockPhase::None, false, DeviceKind::SiN, DeviceKind::SiP});
    prev = out;
  }
  for (auto& n : nl.nodes) n.capacitance_f = kC;
  nl.outputs.push_back({"y", prev});
  return nl;
}

SimConfig two_cycles(BitVector c0, BitVector c1) {
  SimConfig cfg;
  cfg.vdd_v = kVdd;
  cfg.stimulus = {std::move(c0), std::move(c1)};
  return cfg;
}

// Time of the last trace event of `node`.
double last_event(const SimResult& r, NodeId node) {
  double t = -1.0;
  for (const auto& e : r.trace) {
    if (e.node == node) t = e.time_s;
  }
  return t;
}

DynamicNetlist mapped(int bits, Style s, Flavor f) {
  return map_network(build_cla(bits), s, TechnologyConfig::defaults(f), bundled_parameters(f));
}

}  // namespace

TEST(Delay, SingleRcStep) {
  const auto nl = inverter_chain(1);
  const auto r = simulate(nl, two_cycles({1}, {0}));
  const double t = last_event(r, 1) - 1e-9;
  EXPECT_NEAR(t, 0.69 * kR * kC, 0.01 * 0.69 * kR * kC);
  EXPECT_NEAR(t, 6.931e-12, 1e-15);
  EXPECT_EQ(r.outputs.back(), (BitVector{1}));
}

TEST(Delay, InverterChainAddsUp) {
  const double single = 0.69 * kR * kC;
  for (int k : {2, 3, 5, 8}) {
    const auto nl = inverter_chain(k);
    const auto r = simulate(nl, two_cycles({1}, {0}));
    const double t = last_event(r, static_cast<NodeId>(k)) - 1e-9;
    EXPECT_NEAR(t, k * single, 0.01 * k * single) << k;
  }
}

TEST(Delay, SeriesResistancesAddParallelConductancesAdd) {
  auto nl = bare_netlist();
  const NodeId a = nl.add_node("a", NodeRole::Input);
  const NodeId b = nl.add_node("b", NodeRole::Input);
  const NodeId y = nl.add_node("y", NodeRole::Dynamic);
  nl.inputs = {a, b};
  auto leaf = [](NodeId g) { return SwitchGraph::leaf({DeviceKind::SiN, g, false}); };
  DynamicStage st{StageType::DynN, SwitchGraph::series({leaf(a), leaf(b)}), y, ClockPhase::Clk, true,
                  DeviceKind::SiN, DeviceKind::SiP};
  BitVector lv{1, 1, 1};
  EXPECT_EQ(stage_drive(nl, st, lv, true).kind, Drive::Down);
  EXPECT_DOUBLE_EQ(stage_drive(nl, st, lv, true).resistance_ohm, 3 * kR);
  st.eval_network = SwitchGraph::parallel({leaf(a), leaf(b)});
  EXPECT_DOUBLE_EQ(stage_drive(nl, st, lv, true).resistance_ohm, kR / 2 + kR);
  lv = {1, 0, 1};
  EXPECT_DOUBLE_EQ(stage_drive(nl, st, lv, true).resistance_ohm, 2 * kR);
  lv = {0, 0, 1};
  EXPECT_EQ(stage_drive(nl, st, lv, true).kind, Drive::Hold);
  EXPECT_EQ(stage_drive(nl, st, lv, false).kind, Drive::Up);
  EXPECT_DOUBLE_EQ(stage_drive(nl, st, lv, false).resistance_ohm, kR);
}

TEST(Energy, OneRisingSwing) {
  const auto nl = inverter_chain(1);
  const auto r = simulate(nl, two_cycles({1}, {0}));
  EXPECT_DOUBLE_EQ(r.cycle_supply_energy_j[0], 0.0);
  EXPECT_NEAR(r.cycle_supply_energy_j[1], 0.81e-15, 1e-24);
  EXPECT_DOUBLE_EQ(r.supply_energy_j, r.cycle_supply_energy_j[1]);
  EXPECT_DOUBLE_EQ(r.leakage_energy_j, 0.0);
}

TEST(Energy, FallingEdgeDrawsNothing) {
  const auto nl = inverter_chain(1);
  const auto r = simulate(nl, two_cycles({0}, {1}));
  EXPECT_NEAR(r.cycle_supply_energy_j[0], 0.81e-15, 1e-24);
  EXPECT_DOUBLE_EQ(r.cycle_supply_energy_j[1], 0.0);
}

TEST(Energy, LeakageIsSupplyTimesOffCurrent) {
  auto nl = inverter_chain(1);
  nl.devices.at(DeviceKind::SiN).i_off_a = 1e-8;
  nl.devices.at(DeviceKind::SiP).i_off_a = 3e-8;
  const auto r = simulate(nl, two_cycles({1}, {0}));
  EXPECT_NEAR(r.cycle_leakage_energy_j[1], kVdd * 4e-8 * 1e-9, 1e-27);
  EXPECT_NEAR(r.leakage_energy_j, 2 * kVdd * 4e-8 * 1e-9, 1e-27);
}

TEST(Energy, RecomputedFromTrace) {
  for (Style s : {Style::Domino, Style::Np}) {
    const auto nl = mapped(16, s, Flavor::Cnt);
    const auto in = encode_inputs(16, critical_vector(16));
    const auto r = simulate(nl, SimConfig::repeat(nl, in, 3));
    double e = 0.0;
    for (const auto& ev : r.trace) {
      if (ev.level == 1 && nl.nodes[ev.node].role != NodeRole::Input) {
        e += nl.nodes[ev.node].capacitance_f * nl.vdd_v * nl.vdd_v;
      }
    }
    EXPECT_DOUBLE_EQ(r.supply_energy_j, e);
    EXPECT_GT(e, 0.0);
  }
}

TEST(Domino, AllZeroInputsNeverDischarge) {
  const auto nl = mapped(8, Style::Domino, Flavor::Si);
  const BitVector zero(nl.inputs.size(), 0);
  const auto r = simulate(nl, SimConfig::repeat(nl, zero, 3));
  EXPECT_DOUBLE_EQ(r.cycle_supply_energy_j[1], 0.0);
  EXPECT_DOUBLE_EQ(r.cycle_supply_energy_j[2], 0.0);
  for (const auto& ev : r.trace) {
    EXPECT_LT(ev.time_s, 0.5e-9) << nl.nodes[ev.node].name;  // only the first precharge moves anything
  }
  for (const auto& c : r.settle_s) {
    for (const auto& s : c) EXPECT_FALSE(s.has_value());
  }
}

TEST(Simulation, DynamicNodesSwitchMonotonically) {
  std::mt19937_64 rng(3);
  for (Style s : {Style::Domino, Style::Np}) {
    const auto nl = mapped(32, s, Flavor::Hybrid);
    const auto drv = nl.drivers();
    SimConfig cfg;
    cfg.clock_period_s = nl.clock.period_s;
    cfg.vdd_v = nl.vdd_v;
    cfg.cycles = 6;
    for (int c = 0; c < cfg.cycles; ++c) {
      AdderVector v{rng() & width_mask(32), rng() & width_mask(32), (rng() & 1) != 0};
      cfg.stimulus.push_back(encode_inputs(32, v));
    }
    const auto r = simulate(nl, cfg);
    EXPECT_EQ(r.monotonicity_violations, 0u);
    for (const auto& ev : r.trace) {
      const double phase = std::fmod(ev.time_s, cfg.clock_period_s);
      if (phase < cfg.clock_period_s * cfg.duty || drv[ev.node] == kNoDriver) continue;
      const auto type = nl.stages[drv[ev.node]].type;
      EXPECT_TRUE(type != StageType::DynN || ev.level == 0) << nl.nodes[ev.node].name;
      EXPECT_TRUE(type != StageType::DynP || ev.level == 1) << nl.nodes[ev.node].name;
    }
  }
}

TEST(Simulation, FinalOutputsMatchLogic) {
  std::mt19937_64 rng(11);
  for (int bits : {8, 64}) {
    const auto net = build_cla(bits);
    for (Style s : {Style::Domino, Style::Np}) {
      for (Flavor f : kAllFlavors) {
        const auto nl = map_network(net, s, TechnologyConfig::defaults(f), bundled_parameters(f));
        SimConfig cfg;
        cfg.clock_period_s = nl.clock.period_s;
        cfg.vdd_v = nl.vdd_v;
        cfg.cycles = 8;
        cfg.record_trace = false;
        std::vector<AdderVector> vecs{critical_vector(bits)};
        while (vecs.size() < 8) vecs.push_back({rng() & width_mask(bits), rng() & width_mask(bits), (rng() & 1) != 0});
        for (const auto& v : vecs) cfg.stimulus.push_back(encode_inputs(bits, v));
        const auto r = simulate(nl, cfg);
        ASSERT_EQ(r.outputs.size(), vecs.size());
        for (std::size_t c = 0; c < vecs.size(); ++c) {
          EXPECT_EQ(decode_outputs(bits, r.outputs[c]), add(net, vecs[c]))
              << bits << " " << to_string(s) << " " << to_string(f) << " cycle " << c;
        }
      }
    }
  }
}

TEST(Simulation, CriticalVectorSettleTimes) {
  const auto nl = mapped(8, Style::Np, Flavor::Si);
  const auto r = simulate(nl, SimConfig::repeat(nl, encode_inputs(8, critical_vector(8)), 2));
  ASSERT_EQ(r.settle_s.size(), 2u);
  const auto& cout = r.settle_s[1].back();
  ASSERT_TRUE(cout.has_value());
  EXPECT_GT(*cout, 0.0);
  EXPECT_LT(*cout, nl.clock.period_s / 2);
}

TEST(Simulation, Deterministic) {
  const auto nl = mapped(16, Style::Np, Flavor::Si);
  const auto cfg = SimConfig::repeat(nl, encode_inputs(16, {0x1234, 0xFEDC, true}), 3);
  EXPECT_EQ(simulate(nl, cfg), simulate(nl, cfg));
}

TEST(Errors, Contention) {
  auto nl = bare_netlist();
  const NodeId a = nl.add_node("a", NodeRole::Input);
  const NodeId y = nl.add_node("y", NodeRole::Dynamic);
  nl.inputs = {a};
  nl.stages.push_back(DynamicStage{StageType::DynN, SwitchGraph::leaf({DeviceKind::SiN, a, false}), y,
                                   ClockPhase::Clk, false, DeviceKind::SiN, DeviceKind::SiP});
  for (auto& n : nl.nodes) n.capacitance_f = kC;
  nl.outputs.push_back({"y", y});
  try {
    simulate(nl, two_cycles({1}, {1}));
    FAIL() << "expected contention";
  } catch (const SimulationError& e) {
    EXPECT_NE(std::string(e.what()).find("contention on node y"), std::string::npos) << e.what();
  }
}

TEST(Errors, ClockTooShort) {
  const auto nl = mapped(64, Style::Domino, Flavor::Si);
  auto cfg = SimConfig::repeat(nl, encode_inputs(64, critical_vector(64)), 2);
  cfg.clock_period_s = 20e-12;
  cfg.time_resolution_s = 1e-16;
  try {
    simulate(nl, cfg);
    FAIL() << "expected SimulationError";
  } catch (const SimulationError& e) {
    EXPECT_NE(std::string(e.what()).find("clock period too short"), std::string::npos) << e.what();
  }
}

TEST(Errors, ConfigValidation) {
  const auto nl = inverter_chain(1);
  auto cfg = two_cycles({0}, {1});
  EXPECT_TRUE(validate_sim_config(cfg, 1).empty());
  cfg.cycles = 1;
  EXPECT_THROW(simulate(nl, cfg), ValidationError);
  cfg = two_cycles({0}, {1});
  cfg.duty = 1.0;
  EXPECT_THROW(simulate(nl, cfg), ValidationError);
  cfg = two_cycles({0, 1}, {1, 0});
  EXPECT_THROW(simulate(nl, cfg), ValidationError);
  cfg = two_cycles({0}, {1});
  cfg.time_resolution_s = 1e-12;
  EXPECT_THROW(simulate(nl, cfg), ValidationError);
  cfg = two_cycles({0}, {1});
  cfg.clock_period_s = -1;
  cfg.vdd_v = 0;
  EXPECT_EQ(validate_sim_config(cfg, 1).size(), 3u);
}

TEST(Functional, Examples) {
  const auto nl = mapped(8, Style::Domino, Flavor::Si);
  EXPECT_EQ(decode_outputs(8, functional_mode(nl, encode_inputs(8, {0xFF, 0x01, false}))), (AdderResult{0, true}));
  EXPECT_EQ(decode_outputs(8, functional_mode(nl, encode_inputs(8, {100, 27, true}))), (AdderResult{128, false}));
  EXPECT_THROW(functional_mode(nl, BitVector(3, 0)), ValidationError);
}

TEST(Trace, TabSeparatedLines) {
  const auto nl = inverter_chain(1);
  const auto r = simulate(nl, two_cycles({1}, {0}));
  std::ostringstream os;
  write_trace(os, nl, r);
  std::string expected;
  for (const auto& e : r.trace) {
    expected += text::exact(e.time_s) + "\t" + nl.nodes[e.node].name + "\t" + std::to_string(e.level) + "\n";
  }
  EXPECT_EQ(os.str(), expected);
  ASSERT_EQ(r.trace.size(), 3u);  // a rises, a falls, y rises
  EXPECT_EQ(os.str().substr(0, 6), "0\ta\t1\n");
}
