#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/invariants.hpp"

using namespace tflow;

namespace {

NormalizedContactData random_valid(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  bool kill_c213 = gen() & 1, kill_c312 = gen() & 1;
  return NormalizedContactData(kill_c213 ? 0.0 : u(gen), kill_c312 ? u(gen) : 0.0,
                               kill_c312 ? 0.0 : u(gen), kill_c213 ? u(gen) : 0.0);
}

const NormalizedContactData kHeisenberg(0, 0, 0, 0);
const NormalizedContactData kSu2(-1, 0, 1, 0);
const NormalizedContactData kPdqKm1(1, 0, 1, 0); // pdq with K = -1

} // namespace

TEST_CASE("j_endomorphism examples and J^2 = -1") {
  Eigen::Matrix2d j = j_endomorphism(0, 1);
  CHECK(j(0, 1) == -1.0);
  CHECK(j(1, 0) == 1.0);

  // Rossi slice t = 1/2: c = (1-t)/(1+t) = 1/3
  j = j_endomorphism(0, 1.0 / 3.0);
  CHECK(j(0, 1) == doctest::Approx(-3.0));
  CHECK(j(1, 0) == doctest::Approx(1.0 / 3.0));

  j = j_endomorphism(1, 2);
  CHECK(j(0, 0) == 1.0);
  CHECK(j(0, 1) == -1.0);
  CHECK(j(1, 0) == 2.0);
  CHECK(j(1, 1) == -1.0);

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), uc(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    double a = ua(gen), c = uc(gen);
    Eigen::Matrix2d m = j_endomorphism(a, c);
    CHECK(((m * m) + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    // d theta(., J.) on the symplectic frame: omega = [[0,1],[-1,0]]
    Eigen::Matrix2d omega;
    omega << 0, 1, -1, 0;
    Eigen::Matrix2d metric = omega * m;
    CHECK(metric(0, 0) > 0);
    CHECK(metric.determinant() > 0);
  }
  CHECK_THROWS_AS(j_endomorphism(0, -1), Error);
}

TEST_CASE("complex frame duality, eigenvector and normalization") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), uc(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    CRParameters p(ua(gen), 1.0, uc(gen));
    ComplexFrame f = complex_frame(p);
    Complex d11 = f.theta1_alpha * f.z1_u + f.theta1_beta * f.z1_v;
    Complex d10 = f.theta1_alpha * std::conj(f.z1_u) + f.theta1_beta * std::conj(f.z1_v);
    CHECK(std::abs(d11 - 1.0) < 1e-14);
    CHECK(std::abs(d10) < 1e-14);
    // i theta^1 ^ theta^1bar = alpha ^ beta
    Complex wedge = f.theta1_alpha * std::conj(f.theta1_beta) -
                    f.theta1_beta * std::conj(f.theta1_alpha);
    CHECK(std::abs(Complex(0, 1) * wedge - 1.0) < 1e-13);
  }

  // (J - i) Z_1 = 0 at (a, c) = (1, 2)
  CRParameters p(1.0, 1.0, 2.0);
  ComplexFrame f = complex_frame(p);
  Eigen::Matrix2d j = j_endomorphism(1.0, 2.0);
  Complex ju = j(0, 0) * f.z1_u + j(0, 1) * f.z1_v;
  Complex jv = j(1, 0) * f.z1_u + j(1, 1) * f.z1_v;
  CHECK(std::abs(ju - Complex(0, 1) * f.z1_u) < 1e-14);
  CHECK(std::abs(jv - Complex(0, 1) * f.z1_v) < 1e-14);

  // standard unitary frame at (0, 1): Z_1 = (U - iV)/sqrt(2)
  ComplexFrame std_frame = complex_frame(CRParameters(0, 1, 1));
  CHECK(std::abs(std_frame.z1_u - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(std_frame.z1_v - Complex(0, -1) / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("closed-form invariants on the worked examples") {
  // Heisenberg: everything vanishes for any parameters
  PseudohermitianInvariants inv =
      invariants_closed_form(kHeisenberg, CRParameters(0.7, 2.0, 3.0));
  CHECK(std::abs(inv.torsion) == 0.0);
  CHECK(inv.webster == 0.0);

  // pdq with K = 1 at (0, 1, 1): torsion-free, W = 1
  NormalizedContactData pdq1(-1, 0, 1, 0);
  inv = invariants_closed_form(pdq1, CRParameters(0, 1, 1));
  CHECK(std::abs(inv.torsion) < 1e-15);
  CHECK(inv.webster == doctest::Approx(1.0));

  // pdq with K = -1 at (1, 1, 2): torsion = 1 + i/2, W = -1/2
  inv = invariants_closed_form(kPdqKm1, CRParameters(1, 1, 2));
  CHECK(inv.torsion.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inv.torsion.imag() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inv.webster == doctest::Approx(-0.5).epsilon(1e-12));

  // su(2) at the unique torsion-free point
  inv = invariants_closed_form(kSu2, CRParameters(0, 1, 1));
  CHECK(std::abs(inv.torsion) < 1e-15);
  CHECK(inv.webster == doctest::Approx(1.0));
}

TEST_CASE("structure-equation oracle agrees with the closed forms") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ub(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    NormalizedContactData nd = random_valid(gen);
    CRParameters p(ua(gen), ub(gen), ub(gen));
    PseudohermitianInvariants cf = invariants_closed_form(nd, p);
    PseudohermitianInvariants se = invariants_from_structure_equations(nd, p);
    worst = std::max(worst, std::abs(cf.c_theta - se.c_theta) / (1 + std::abs(se.c_theta)));
    worst = std::max(worst, std::abs(cf.c_z - se.c_z) / (1 + std::abs(se.c_z)));
    worst = std::max(worst, std::abs(cf.torsion - se.torsion) / (1 + std::abs(se.torsion)));
    worst = std::max(worst, std::abs(cf.webster - se.webster) / (1 + std::abs(se.webster)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("webster identity and reality") {
  std::mt19937_64 gen(10);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ub(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    NormalizedContactData nd = random_valid(gen);
    CRParameters p(ua(gen), ub(gen), ub(gen));
    PseudohermitianInvariants inv = invariants_from_structure_equations(nd, p);
    CHECK(std::abs(inv.webster + inv.c_theta + 2.0 * std::norm(inv.c_z)) <
          1e-13 * (1 + std::abs(inv.webster)));
  }
}

TEST_CASE("rescale_b examples and the exact scaling law") {
  CRParameters p(1, 1, 2);
  CRParameters same = rescale_b(p, 1.0);
  CHECK(same.b == 1.0);

  PseudohermitianInvariants base = invariants_closed_form(kPdqKm1, p);
  PseudohermitianInvariants half = invariants_closed_form(kPdqKm1, rescale_b(p, 2.0));
  CHECK(half.torsion.real() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(half.torsion.imag() == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(half.webster == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(std::abs(half.torsion - base.torsion / 4.0) < 1e-15);

  PseudohermitianInvariants heis =
      invariants_closed_form(kHeisenberg, rescale_b(CRParameters(0.3, 1, 1.2), 3.0));
  CHECK(std::abs(heis.torsion) == 0.0);
  CHECK(heis.webster == 0.0);

  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ub(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    NormalizedContactData nd = random_valid(gen);
    CRParameters q(ua(gen), ub(gen), ub(gen));
    double lam = ub(gen);
    PseudohermitianInvariants b0 = invariants_closed_form(nd, q);
    PseudohermitianInvariants b1 = invariants_closed_form(nd, rescale_b(q, lam));
    double l2 = lam * lam;
    CHECK(std::abs(b1.torsion - b0.torsion / l2) < 1e-14 * (1 + std::abs(b0.torsion) / l2));
    CHECK(std::abs(b1.webster - b0.webster / l2) < 1e-14 * (1 + std::abs(b0.webster) / l2));
  }
  CHECK_THROWS_AS(rescale_b(p, 0.0), Error);
}

TEST_CASE("L_T J = 2 J A") {
  // Heisenberg: the Reeb field is central
  CHECK(lie_derivative_reeb_J(kHeisenberg, 0.4, 1.3).cwiseAbs().maxCoeff() == 0.0);

  // su(2) at the torsion-free structure
  CHECK(lie_derivative_reeb_J(kSu2, 0.0, 1.0).cwiseAbs().maxCoeff() < 1e-15);

  // pdq K = -1 at (1, 2) against the torsion expansion
  PseudohermitianInvariants inv = invariants_closed_form(kPdqKm1, CRParameters(1, 1, 2));
  Eigen::Matrix2d lt = lie_derivative_reeb_J(kPdqKm1, 1.0, 2.0);
  Eigen::Matrix2d expected =
      2.0 * j_endomorphism(1, 2) * torsion_matrix(1, 2, std::conj(inv.torsion));
  CHECK((lt - expected).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ub(0.1, 10.0);
  for (int i = 0; i < 100; ++i) {
    NormalizedContactData nd = random_valid(gen);
    double a = ua(gen), c = ub(gen);
    PseudohermitianInvariants iv = invariants_closed_form(nd, CRParameters(a, 1, c));
    Eigen::Matrix2d lhs = lie_derivative_reeb_J(nd, a, c);
    Eigen::Matrix2d rhs2 =
        2.0 * j_endomorphism(a, c) * torsion_matrix(a, c, std::conj(iv.torsion));
    CHECK((lhs - rhs2).cwiseAbs().maxCoeff() < 1e-12 * (1 + rhs2.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("torsion vanishes exactly on the predicted set") {
  // a = 0, c = sqrt(-c3_12 / c2_13)
  NormalizedContactData nd(-2, 0, 1, 0);
  double c_star = std::sqrt(0.5);
  CHECK(std::abs(invariants_closed_form(nd, CRParameters(0, 1, c_star)).torsion) < 1e-15);
  CHECK(std::abs(invariants_closed_form(nd, CRParameters(0, 1, 2 * c_star)).torsion) >
        1e-3);
  CHECK(std::abs(invariants_closed_form(nd, CRParameters(0.5, 1, c_star)).torsion) > 1e-3);

  // c2_13 = c3_12 = 0: torsion-free for every (a, c)
  NormalizedContactData free_nd(0, 0.8, 0, 0);
  for (double a : {-1.0, 0.0, 2.0})
    for (double c : {0.3, 1.0, 4.0})
      CHECK(std::abs(invariants_closed_form(free_nd, CRParameters(a, 1, c)).torsion) == 0.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CRParameters(0, -1, 1), Error);
  CHECK_THROWS_AS(CRParameters(0, 1, 0), Error);
  CHECK_THROWS_AS(lie_derivative_reeb_J(kSu2, 0, -2), Error);
}
