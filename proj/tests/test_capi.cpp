// Exercises the shared-library surface only: no core headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "torsionflow/torsionflow.h"

namespace {
struct Contact {
  tf_contact* ptr = nullptr;
  ~Contact() { tf_contact_free(ptr); }
};
} // namespace

TEST_CASE("version and error text") {
  CHECK(std::string(tf_version()).size() > 0);
  tf_contact* out = nullptr;
  CHECK(tf_contact_preset("does-not-exist", 0.0, &out, nullptr) == TF_ERR_UNKNOWN_PRESET);
  CHECK(std::string(tf_last_error()).find("does-not-exist") != std::string::npos);
}

TEST_CASE("presets, classification and fixed points") {
  Contact su2;
  tf_state s0;
  REQUIRE(tf_contact_preset("su2", 0.0, &su2.ptr, &s0) == TF_OK);
  CHECK(s0.a == 0.0);
  CHECK(s0.c == 1.0);
  CHECK(s0.B == 1.0);

  tf_geometry geom;
  int tf_free = 0, uni = 0;
  REQUIRE(tf_contact_classify(su2.ptr, &geom, &tf_free, &uni) == TF_OK);
  CHECK(geom == TF_GEOMETRY_SU2);
  CHECK(tf_free == 1);
  CHECK(uni == 1);

  tf_fixed_points_kind fpk;
  double fa = -1, fc = -1;
  REQUIRE(tf_contact_fixed_points(su2.ptr, &fpk, &fa, &fc) == TF_OK);
  CHECK(fpk == TF_FIXED_POINTS_ISOLATED);
  CHECK(fa == 0.0);
  CHECK(fc == doctest::Approx(1.0));

  tf_dynamics dyn;
  REQUIRE(tf_contact_dynamics(su2.ptr, &dyn) == TF_OK);
  CHECK(dyn == TF_DYNAMICS_ATTRACTING);

  double coeff[4];
  REQUIRE(tf_contact_coefficients(su2.ptr, coeff) == TF_OK);
  CHECK(coeff[0] == -1.0);
  CHECK(coeff[2] == 1.0);
}

TEST_CASE("normalized constructor enforces the Jacobi constraints") {
  tf_contact* bad = nullptr;
  CHECK(tf_contact_normalized(1.0, 0.0, 1.0, 1.0, &bad) == TF_ERR_JACOBI);
  Contact good;
  CHECK(tf_contact_normalized(0.0, 0.0, -1.0, 0.0, &good.ptr) == TF_OK);
  tf_geometry geom;
  REQUIRE(tf_contact_classify(good.ptr, &geom, nullptr, nullptr) == TF_OK);
  CHECK(geom == TF_GEOMETRY_E11);
}

TEST_CASE("raw constants route through frame normalization") {
  // Heisenberg with w^2 and w^3 swapped: c^1_{23} = -1.
  double raw[27] = {0};
  raw[3 * 1 + 2] = -1.0; // c[0][1][2]
  raw[3 * 2 + 1] = 1.0;  // c[0][2][1]
  double theta[3] = {1, 0, 0};
  Contact heis;
  REQUIRE(tf_contact_raw(raw, theta, &heis.ptr) == TF_OK);
  tf_geometry geom;
  REQUIRE(tf_contact_classify(heis.ptr, &geom, nullptr, nullptr) == TF_OK);
  CHECK(geom == TF_GEOMETRY_HEISENBERG);

  // w^2 is not contact on this algebra
  double bad_theta[3] = {0, 1, 0};
  tf_contact* out = nullptr;
  CHECK(tf_contact_raw(raw, bad_theta, &out) == TF_ERR_NOT_CONTACT);

  // broken antisymmetry
  double asym[27] = {0};
  asym[3 * 1 + 2] = 1.0;
  CHECK(tf_contact_raw(asym, theta, &out) == TF_ERR_ANTISYMMETRY);
}

TEST_CASE("invariants through both routes") {
  Contact pdq;
  REQUIRE(tf_contact_preset("pdq", -1.0, &pdq.ptr, nullptr) == TF_OK);
  tf_invariants closed, oracle;
  REQUIRE(tf_invariants_compute(pdq.ptr, 1.0, 1.0, 2.0, 0, &closed) == TF_OK);
  REQUIRE(tf_invariants_compute(pdq.ptr, 1.0, 1.0, 2.0, 1, &oracle) == TF_OK);
  CHECK(closed.torsion_re == doctest::Approx(1.0));
  CHECK(closed.torsion_im == doctest::Approx(0.5));
  CHECK(closed.webster == doctest::Approx(-0.5));
  CHECK(closed.torsion_re == doctest::Approx(oracle.torsion_re).epsilon(1e-12));
  CHECK(closed.webster == doctest::Approx(oracle.webster).epsilon(1e-12));
  tf_invariants bad;
  CHECK(tf_invariants_compute(pdq.ptr, 0.0, -1.0, 1.0, 0, &bad) ==
        TF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("rhs and phase field") {
  Contact su2;
  REQUIRE(tf_contact_preset("su2", 0.0, &su2.ptr, nullptr) == TF_OK);
  tf_state s{0.0, 2.0, 1.0, 0.0, 0.0, 0, 0};
  tf_state d;
  REQUIRE(tf_flow_rhs(su2.ptr, TF_FLOW_NORMALIZED, &s, &d) == TF_OK);
  CHECK(d.a == 0.0);
  CHECK(d.c == doctest::Approx(-3.0));

  tf_state missing{0.0, 1.0, 1.0, 0.0, 0.0, 0, 0};
  CHECK(tf_flow_rhs(su2.ptr, TF_FLOW_COUPLED_F, &missing, &d) == TF_ERR_MISSING_FIELD);

  double buffer[4 * 3 * 2];
  REQUIRE(tf_phase_field(su2.ptr, -1, 1, 0.5, 1.5, 3, 2, buffer) == TF_OK);
  CHECK(buffer[0] == -1.0);
  CHECK(buffer[1] == 0.5);
}

TEST_CASE("integration and trajectory access") {
  Contact pdq;
  tf_state s0;
  REQUIRE(tf_contact_preset("pdq", 1.0, &pdq.ptr, &s0) == TF_OK);
  tf_integrate_opts opts;
  tf_integrate_opts_default(&opts);
  CHECK(opts.rtol == 1e-10);
  CHECK(opts.samples == 200);

  tf_trajectory* traj = nullptr;
  REQUIRE(tf_integrate(pdq.ptr, TF_FLOW_UNNORMALIZED, &s0, 1.0, &opts, &traj) == TF_OK);
  size_t n = tf_trajectory_size(traj);
  CHECK(n >= 2);
  tf_sample first, last;
  REQUIRE(tf_trajectory_sample(traj, 0, &first) == TF_OK);
  REQUIRE(tf_trajectory_sample(traj, n - 1, &last) == TF_OK);
  CHECK(first.t == 0.0);
  CHECK(first.state.B == 1.0);
  CHECK(last.state.B == doctest::Approx(1.0 - 2.0 * last.t).epsilon(1e-9));
  tf_event ev;
  REQUIRE(tf_trajectory_event(traj, &ev) == TF_OK);
  CHECK(ev.kind == TF_EVENT_DOMAIN_EXIT);
  CHECK(std::strcmp(ev.field, "B") == 0);
  CHECK(tf_trajectory_sample(traj, n, &first) == TF_ERR_INVALID_ARGUMENT);
  tf_trajectory_free(traj);
}

TEST_CASE("entropy values and reports") {
  tf_state s{0.0, 1.0, 1.3, -0.4, 0.8, 1, 1};
  double v1 = 0.0, v2 = 0.0;
  REQUIRE(tf_entropy_value(TF_ENTROPY_W_PLUS, &s, 1.7, 1.0, &v1) == TF_OK);
  tf_state sc = s;
  sc.B *= 2.0;
  sc.tau *= 2.0;
  REQUIRE(tf_entropy_value(TF_ENTROPY_W_PLUS, &sc, 0.85, 1.0, &v2) == TF_OK);
  CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));

  Contact su2;
  tf_state s0;
  REQUIRE(tf_contact_preset("su2", 0.0, &su2.ptr, &s0) == TF_OK);
  s0.c = 2.0;
  tf_entropy_report* rep = nullptr;
  REQUIRE(tf_entropy_run(su2.ptr, TF_FLOW_COUPLED_F, &s0, 0.15, 1.0, 0, &rep) == TF_OK);
  double max_violation = 1.0, drift = 1.0;
  tf_weighting matched;
  tf_event terminal;
  REQUIRE(tf_entropy_report_summary(rep, &max_violation, &drift, &matched, &terminal) ==
          TF_OK);
  CHECK(max_violation <= 1e-8);
  CHECK(drift < 1e-9);
  CHECK(matched == TF_WEIGHTING_UNWEIGHTED);
  size_t n = tf_entropy_report_size(rep);
  CHECK(n >= 100);
  tf_entropy_sample smp;
  REQUIRE(tf_entropy_report_sample(rep, 1, &smp) == TF_OK);
  CHECK(std::isfinite(smp.value));
  CHECK(smp.constraint == doctest::Approx(1.0).epsilon(1e-9));
  tf_entropy_report_free(rep);

  CHECK(tf_entropy_value(TF_ENTROPY_F, &s0, 1.0, 1.0, &v1) == TF_ERR_MISSING_FIELD);
}

TEST_CASE("verify runs and the fault hook fires") {
  struct Tally {
    int suites = 0;
    int failed = 0;
  } tally;
  auto cb = [](const char* suite, int pass, const char* detail, void* user) {
    auto* t = static_cast<Tally*>(user);
    ++t->suites;
    if (!pass) ++t->failed;
    CHECK(suite != nullptr);
    CHECK(detail != nullptr);
  };
  int failures = -1;
  REQUIRE(tf_verify_run(7, 40, 0, cb, &tally, &failures) == TF_OK);
  CHECK(failures == 0);
  CHECK(tally.suites >= 15);
  CHECK(tally.failed == 0);

  Tally tally2;
  REQUIRE(tf_verify_run(7, 40, 1, cb, &tally2, &failures) == TF_OK);
  CHECK(failures >= 1);
}
