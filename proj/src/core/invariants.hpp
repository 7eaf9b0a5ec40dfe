#ifndef TFLOW_INVARIANTS_HPP
#define TFLOW_INVARIANTS_HPP

#include <Eigen/Dense>
#include <complex>

#include "structure.hpp"

namespace tflow {

using Complex = std::complex<double>;

/// Parameters of a homogeneous complex structure and conformal scale:
/// J has the matrix [[a, -(1+a^2)/c], [c, -a]] in the symplectic frame and
/// the contact form is scaled by b^2.
struct CRParameters {
  double a;
  double b;
  double c;

  CRParameters(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {
    if (!(b > 0.0)) fail(Err::InvalidArgument, "CR parameter b must be positive");
    if (!(c > 0.0)) fail(Err::InvalidArgument, "CR parameter c must be positive");
  }
};

struct PseudohermitianInvariants {
  double c_theta;   // theta_b-coefficient of the connection form over i
  Complex c_z;      // theta^1-coefficient of the connection form over i
  Complex torsion;  // A^1_{1bar}
  double webster;   // W
};

/// J in the frame (U, V); squares to -identity, d(theta)(., J.) positive definite.
Eigen::Matrix2d j_endomorphism(double a, double c);

/// Unitary frame and coframe adapted to J_{abc}: Z_1 in (U_b, V_b) and
/// theta^1 in (alpha_b, beta_b). Z_{1bar}, theta^{1bar} are the conjugates.
struct ComplexFrame {
  Complex z1_u, z1_v;         // Z_1 = z1_u U_b + z1_v V_b
  Complex theta1_alpha, theta1_beta; // theta^1 = . alpha_b + . beta_b
};

ComplexFrame complex_frame(const CRParameters& p);

/// Connection coefficient, torsion and Webster curvature from the explicit
/// closed-form expressions.
PseudohermitianInvariants invariants_closed_form(const NormalizedContactData& nd,
                                                 const CRParameters& p);

/// Same invariants read off numerically from the structure equations:
/// d(theta^1) paired against (Z_1, Z_{1bar}), (T_b, Z_1), (T_b, Z_{1bar}),
/// then W = -c_theta - 2|c_Z|^2. Independent of the closed-form path.
PseudohermitianInvariants invariants_from_structure_equations(
    const NormalizedContactData& nd, const CRParameters& p);

/// b -> lambda b. Invariants scale by 1/lambda^2.
CRParameters rescale_b(const CRParameters& p, double lambda);

/// (L_T J)(X) = [T, JX] - J[T, X] on the invariant frame at b = 1,
/// as a 2x2 matrix on (X_2, X_3). Equals 2 J A for the torsion matrix A.
Eigen::Matrix2d lie_derivative_reeb_J(const NormalizedContactData& nd, double a,
                                      double c);

/// Real matrix of the torsion tensor on (U, V) at b = 1, from the expansion of
/// A_{11} Z_{1bar} (x) theta^1 + conj. Here A_{11} = conj(A^1_{1bar}).
Eigen::Matrix2d torsion_matrix(double a, double c, Complex a11);

} // namespace tflow

#endif
