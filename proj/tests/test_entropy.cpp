#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/entropy.hpp"

using namespace tflow;

namespace {
const NormalizedContactData kSu2(-1, 0, 1, 0);
const NormalizedContactData kHeisenberg(0, 0, 0, 0);
}

TEST_CASE("functional values at single states") {
  FlowState s;
  s.B = 1.0;
  // Heisenberg: W = 0 kills E_H and F
  CHECK(functional_value(EntropyConfig(EntropyKind::EinsteinHilbert, 1.0), s, 0.0) == 0.0);
  s.phi = 0.7;
  CHECK(functional_value(EntropyConfig(EntropyKind::F, 1.0), s, 0.0) == 0.0);

  // pdq K=1 at (0,1,1): W = 1, E_H = 1
  FlowState t;
  t.B = 1.0;
  CHECK(functional_value(EntropyConfig(EntropyKind::EinsteinHilbert, 1.0), t, 1.0) == 1.0);
  // linear in vol0
  CHECK(functional_value(EntropyConfig(EntropyKind::EinsteinHilbert, 2.5), t, 1.0) == 2.5);

  FlowState bare;
  CHECK_THROWS_AS(functional_value(EntropyConfig(EntropyKind::F, 1.0), bare, 1.0), Error);
  CHECK_THROWS_AS(functional_value(EntropyConfig(EntropyKind::WPlus, 1.0), bare, 1.0),
                  Error);
  CHECK_THROWS_AS(EntropyConfig(EntropyKind::F, -1.0), Error);
}

TEST_CASE("W+- values are invariant under (B, W, tau) -> (lB, W/l, ltau)") {
  FlowState s;
  s.B = 1.3;
  s.phi = -0.4;
  s.tau = 0.8;
  double w = 1.7;
  for (EntropyKind kind : {EntropyKind::WPlus, EntropyKind::WMinus}) {
    EntropyConfig cfg(kind, 1.0);
    double base = functional_value(cfg, s, w);
    for (double lam : {0.5, 2.0, 10.0}) {
      FlowState sc = s;
      sc.B = lam * s.B;
      sc.tau = lam * *s.tau;
      CHECK(functional_value(cfg, sc, w / lam) ==
            doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("constraint solving and conservation") {
  FlowState s0;
  s0.B = 1.7;
  s0.tau = 1.0;
  s0.phi = solve_initial_phi(EntropyKind::F, s0, EntropyConfig(EntropyKind::F, 1.0));
  CHECK(constraint_value(EntropyKind::F, s0, EntropyConfig(EntropyKind::F, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  s0.phi = solve_initial_phi(EntropyKind::WPlus, s0, EntropyConfig(EntropyKind::WPlus, 1.0));
  CHECK(constraint_value(EntropyKind::WPlus, s0, EntropyConfig(EntropyKind::WPlus, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));

  // heisenberg: value 1 stays exactly 1 (phi and tau still move for W+)
  FlowState h;
  h.phi = 0.0;
  h.tau = 1.0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledWPlus, kHeisenberg, h, 1.0,
                                           EntropyConfig(EntropyKind::WPlus, 1.0));
  CHECK(rep.constraint_drift < 1e-12);

  // moving flows conserve it to integrator accuracy
  FlowState s;
  s.c = 2.0;
  rep = run_with_report(FlowKind::CoupledF, kSu2, s, 0.15, EntropyConfig{});
  CHECK(rep.constraint_drift < 1e-9);
  s.tau = 1.0;
  rep = run_with_report(FlowKind::CoupledWPlus, kSu2, s, 0.4, EntropyConfig{});
  CHECK(rep.constraint_drift < 1e-9);
}

TEST_CASE("F-functional monotone on su(2), matches the unweighted theorem form") {
  FlowState s0;
  s0.a = 0.0;
  s0.c = 2.0;
  s0.B = 1.0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledF, kSu2, s0, 0.15,
                                           EntropyConfig{});
  CHECK(rep.max_violation <= 1e-8);
  CHECK(rep.matched == Weighting::Unweighted);
  CHECK(rep.match_rel_error < 1e-4);
  CHECK(rep.terminal.kind == TerminalEvent::Kind::Completed);
  // F equals W under the unit constraint; it must strictly decrease here
  CHECK(rep.samples.back().value < rep.samples.front().value);
}

TEST_CASE("W- runs terminate at tau_min and stay monotone") {
  FlowState s0;
  s0.a = 0.0;
  s0.c = 2.0;
  s0.tau = 1.0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledWMinus, kSu2, s0, 5.0,
                                           EntropyConfig{});
  CHECK(rep.terminal.kind == TerminalEvent::Kind::DomainExit);
  CHECK(rep.terminal.field == "tau");
  CHECK(rep.max_violation <= 1e-8);
  CHECK(rep.matched == Weighting::Weighted);
}

TEST_CASE("W+ monotone and weighted on su(2)") {
  FlowState s0;
  s0.a = 0.3;
  s0.c = 2.0;
  s0.tau = 1.0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledWPlus, kSu2, s0, 0.4,
                                           EntropyConfig{});
  CHECK(rep.max_violation <= 1e-8);
  CHECK(rep.matched == Weighting::Weighted);
  CHECK(rep.match_rel_error < 1e-4);
}

TEST_CASE("heisenberg reports vanish identically") {
  FlowState s0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledF, kHeisenberg, s0, 1.0,
                                           EntropyConfig{});
  for (const auto& ms : rep.samples) {
    CHECK(ms.value == 0.0);
    CHECK(ms.rhs_unweighted == 0.0);
    CHECK(ms.rhs_weighted == 0.0);
    if (!std::isnan(ms.derivative)) CHECK(ms.derivative == 0.0);
  }
  CHECK(rep.max_violation <= 0.0);
}

TEST_CASE("strictness: the derivative only stalls where A and W vanish") {
  // su(2) started at the torsion-free point: A = 0 but W = 1, so dF/dt < 0.
  FlowState s0;
  s0.c = 1.0;
  MonotonicityReport rep = run_with_report(FlowKind::CoupledF, kSu2, s0, 0.2,
                                           EntropyConfig{});
  bool some_motion = false;
  for (const auto& ms : rep.samples)
    if (!std::isnan(ms.derivative) && ms.derivative < -1e-3) some_motion = true;
  CHECK(some_motion);
  // Heisenberg is the strict case: derivative ~ 0 and invariants ~ 0.
  FlowState h;
  MonotonicityReport heis = run_with_report(FlowKind::CoupledF, kHeisenberg, h, 1.0,
                                            EntropyConfig{});
  for (const auto& ms : heis.samples)
    if (!std::isnan(ms.derivative)) CHECK(std::abs(ms.derivative) < 1e-8);
}

TEST_CASE("run_with_report rejects non-coupled kinds") {
  FlowState s0;
  CHECK_THROWS_AS(run_with_report(FlowKind::Unnormalized, kSu2, s0, 1.0, EntropyConfig{}),
                  Error);
}
