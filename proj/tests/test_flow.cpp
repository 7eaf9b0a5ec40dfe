#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/flow.hpp"

using namespace tflow;

namespace {
const NormalizedContactData kHeisenberg(0, 0, 0, 0);
const NormalizedContactData kSu2(-1, 0, 1, 0);
}

TEST_CASE("normalized rhs on su(2) from (0, 2)") {
  FlowState s;
  s.a = 0.0;
  s.c = 2.0;
  FlowDerivative d = rhs(FlowKind::Normalized, kSu2, s);
  CHECK(d.da == 0.0);
  CHECK(d.dc == doctest::Approx(-3.0).epsilon(1e-14));

  s.c = 1.0; // the fixed point
  d = rhs(FlowKind::Normalized, kSu2, s);
  CHECK(d.da == 0.0);
  CHECK(d.dc == 0.0);
}

TEST_CASE("unnormalized pdq rhs at a = 0 matches the reduced ODE") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> uc(0.3, 3.0);
  for (double K : {-1.0, 0.0, 1.0, 2.0}) {
    NormalizedContactData nd(-K, 0, 1, 0);
    for (int i = 0; i < 20; ++i) {
      FlowState s;
      s.c = uc(gen);
      s.B = uc(gen);
      FlowDerivative d = rhs(FlowKind::Unnormalized, nd, s);
      CHECK(d.da == doctest::Approx(0.0));
      CHECK(d.dc == doctest::Approx((1.0 - s.c * s.c * K) / s.B).epsilon(1e-12));
      CHECK(d.dB == doctest::Approx(-s.c * K - 1.0 / s.c).epsilon(1e-12));
    }
  }
}

TEST_CASE("heisenberg rhs is trivial except for phi and tau") {
  FlowState s;
  s.phi = 0.3;
  s.tau = 2.0;
  for (FlowKind kind : {FlowKind::Unnormalized, FlowKind::Normalized, FlowKind::CoupledF,
                        FlowKind::CoupledWPlus, FlowKind::CoupledWMinus}) {
    FlowDerivative d = rhs(kind, kHeisenberg, s);
    CHECK(d.da == 0.0);
    CHECK(d.dc == 0.0);
    CHECK(d.dB == 0.0);
    switch (kind) {
      case FlowKind::CoupledF:
        CHECK(d.dphi == 0.0); // W = 0
        break;
      case FlowKind::CoupledWPlus:
        CHECK(d.dphi == doctest::Approx(-2.0)); // 4(0 - 1/2)
        CHECK(d.dtau == 2.0);
        break;
      case FlowKind::CoupledWMinus:
        CHECK(d.dphi == doctest::Approx(2.0));
        CHECK(d.dtau == -2.0);
        break;
      default:
        break;
    }
  }
}

TEST_CASE("coupled kinds demand their fields") {
  FlowState bare;
  CHECK_THROWS_AS(rhs(FlowKind::CoupledF, kSu2, bare), Error);
  CHECK_THROWS_AS(rhs(FlowKind::CoupledWPlus, kSu2, bare), Error);
  FlowState with_phi = bare;
  with_phi.phi = 0.0;
  CHECK_NOTHROW(rhs(FlowKind::CoupledF, kSu2, with_phi));
  CHECK_THROWS_AS(rhs(FlowKind::CoupledWMinus, kSu2, with_phi), Error);

  FlowState bad;
  bad.c = -1.0;
  CHECK_THROWS_AS(rhs(FlowKind::Unnormalized, kSu2, bad), Error);
  FlowState bad_tau;
  bad_tau.phi = 0.0;
  bad_tau.tau = -1.0;
  CHECK_THROWS_AS(rhs(FlowKind::CoupledWPlus, kSu2, bad_tau), Error);
}

TEST_CASE("general J-part reproduces the normalized ODE coefficientwise") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ua(-3.0, 3.0), uc(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    NormalizedContactData nd(u(gen), 0, u(gen), 0);
    double a = ua(gen), c = uc(gen);
    PseudohermitianInvariants inv = invariants_closed_form(nd, CRParameters(a, 1, c));
    double da, dc;
    j_part(a, c, std::conj(inv.torsion), da, dc);
    double da_ref = nd.c2_13() * a * c - nd.c3_12() * (a * a + 1) * a / c;
    double dc_ref = nd.c2_13() * c * c + nd.c3_12() * (1 - a * a);
    worst = std::max(worst, std::abs(da - da_ref) / (1 + std::abs(da_ref)));
    worst = std::max(worst, std::abs(dc - dc_ref) / (1 + std::abs(dc_ref)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("fixed point sets") {
  FixedPointSet fp = fixed_points(kSu2);
  REQUIRE(fp.kind == FixedPointSet::Kind::Isolated);
  CHECK(fp.points[0].first == 0.0);
  CHECK(fp.points[0].second == doctest::Approx(1.0));

  // the point evaluates to zero torsion through both routes
  PseudohermitianInvariants cf =
      invariants_closed_form(kSu2, CRParameters(0, 1, fp.points[0].second));
  PseudohermitianInvariants se =
      invariants_from_structure_equations(kSu2, CRParameters(0, 1, fp.points[0].second));
  CHECK(std::abs(cf.torsion) < 1e-14);
  CHECK(std::abs(se.torsion) < 1e-14);

  CHECK(fixed_points(NormalizedContactData(0, 0, 1, 0)).kind == FixedPointSet::Kind::None);
  CHECK(fixed_points(kHeisenberg).kind == FixedPointSet::Kind::All);
  CHECK(fixed_points(NormalizedContactData(1, 0, 1, 0)).kind == FixedPointSet::Kind::None);
  FixedPointSet sl2 = fixed_points(NormalizedContactData(1, 0, -1, 0));
  CHECK(sl2.kind == FixedPointSet::Kind::Isolated);
  CHECK(sl2.points[0].second == doctest::Approx(1.0));
}

TEST_CASE("dynamics classification") {
  CHECK(classify_dynamics(kSu2) == DynamicsClass::Attracting);
  CHECK(classify_dynamics(NormalizedContactData(1, 0, -1, 0)) == DynamicsClass::Repelling);
  CHECK(classify_dynamics(NormalizedContactData(0, 0, 1, 0)) ==
        DynamicsClass::Unclassified);
}

TEST_CASE("phase field grids and sign laws") {
  auto su2_nodes = phase_field(kSu2, -2, 2, 0.25, 4, 20, 20);
  CHECK(su2_nodes.size() == 400);
  for (const auto& n : su2_nodes)
    if (n.a != 0.0) CHECK(n.a * n.da < 0.0);

  auto rep_nodes = phase_field(NormalizedContactData(1, 0, -1, 0), -2, 2, 0.25, 4, 21, 21);
  for (const auto& n : rep_nodes) {
    if (n.a != 0.0) CHECK(n.a * n.da > 0.0);
    if (n.a == 0.0 && n.c == 1.0) {
      CHECK(n.da == 0.0);
      CHECK(n.dc == 0.0);
    }
  }
  CHECK_THROWS_AS(phase_field(kSu2, -1, 1, -1, 1, 5, 5), Error);
}

TEST_CASE("torsion norm weight calibrates to 1") {
  CHECK(torsion_norm_weight() == 1);
}

TEST_CASE("variation identities along pdq trajectories") {
  // Heisenberg: both sides vanish identically.
  FlowState s0;
  VariationReport rep = variation_identity_check(kHeisenberg, s0, 1e-4);
  CHECK(rep.webster_residual < 1e-12);
  CHECK(rep.torsion_residual < 1e-12);

  // torus case: the closed form is c = e^t, B = e^{-t}; W and A are constant
  NormalizedContactData pdq0(0, 0, 1, 0);
  rep = variation_identity_check(pdq0, s0, 2e-5);
  CHECK(rep.webster_residual < 1e-6);
  CHECK(rep.torsion_residual < 1e-6);
  CHECK(rep.kappa == 1);

  // sphere case before blow-up
  NormalizedContactData pdq1(-1, 0, 1, 0);
  FlowState s1;
  s1.c = 2.0;
  rep = variation_identity_check(pdq1, s1, 2e-5);
  CHECK(rep.webster_residual < 1e-6);
  CHECK(rep.torsion_residual < 1e-6);

  CHECK_THROWS_AS(variation_identity_check(pdq0, s0, 1e-2), Error);
}
