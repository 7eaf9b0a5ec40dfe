#include "invariants.hpp"

#include <cmath>

namespace tflow {

namespace {
const Complex kI(0.0, 1.0);
}

Eigen::Matrix2d j_endomorphism(double a, double c) {
  if (!(c > 0.0)) fail(Err::InvalidArgument, "j_endomorphism requires c > 0");
  Eigen::Matrix2d j;
  j << a, -(1.0 + a * a) / c, c, -a;
  return j;
}

ComplexFrame complex_frame(const CRParameters& p) {
  double a = p.a, c = p.c;
  double n = std::sqrt(2.0 * c * (a * a + 1.0));
  ComplexFrame f;
  f.z1_u = (a * a + 1.0) / n;
  f.z1_v = c * Complex(a, -1.0) / n;
  f.theta1_alpha = n * (-kI / (2.0 * Complex(a, -1.0)));
  f.theta1_beta = n * (kI / (2.0 * c));
  return f;
}

PseudohermitianInvariants invariants_closed_form(const NormalizedContactData& nd,
                                                 const CRParameters& p) {
  double a = p.a, b = p.b, c = p.c;
  double b2 = b * b;
  double a21 = a * a + 1.0;

  PseudohermitianInvariants out;
  out.c_theta = (-a21 / (2.0 * c) * nd.c3_12() + 0.5 * c * nd.c2_13()) / b2;
  out.torsion = (kI * a21 / (2.0 * c) * nd.c3_12() -
                 kI * c * Complex(a, 1.0) / (2.0 * Complex(a, -1.0)) * nd.c2_13()) /
                b2;
  // theta^1-coefficient; carries 1/b from the coframe scaling.
  out.c_z = kI / (b * std::sqrt(2.0 * c * a21)) *
            (c * Complex(a, -1.0) * nd.c2_23() - a21 * nd.c3_23());
  out.webster = (a21 / (2.0 * c) * nd.c3_12() - 0.5 * c * nd.c2_13() -
                 c * nd.c2_23() * nd.c2_23() + 2.0 * a * nd.c2_23() * nd.c3_23() -
                 a21 / c * nd.c3_23() * nd.c3_23()) /
                b2;
  return out;
}

PseudohermitianInvariants invariants_from_structure_equations(
    const NormalizedContactData& nd, const CRParameters& p) {
  double a = p.a, b = p.b, c = p.c;
  StructureConstants sc = nd.constants();
  ComplexFrame f = complex_frame(p);

  // Frame vectors in the X-basis: T_b = X_1/b^2, U_b = X_2/b, V_b = X_3/b.
  Eigen::Vector3cd tb(1.0 / (b * b), 0.0, 0.0);
  Eigen::Vector3cd z1(0.0, f.z1_u / b, f.z1_v / b);
  Eigen::Vector3cd z1bar = z1.conjugate();

  // theta^1 in the w-coframe; alpha_b = b w^2, beta_b = b w^3.
  Eigen::Vector3cd th1(0.0, b * f.theta1_alpha, b * f.theta1_beta);

  auto d_theta1 = [&](const Eigen::Vector3cd& x, const Eigen::Vector3cd& y) {
    Complex s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) s += th1[i] * sc.coeff(i, j, k) * x[j] * y[k];
    return s;
  };

  Complex i_cz_bar = d_theta1(z1, z1bar);        // = i conj(c_Z)
  Complex minus_i_ctheta = d_theta1(tb, z1);     // = -i c_theta
  Complex torsion = d_theta1(tb, z1bar);         // = A^1_{1bar}

  PseudohermitianInvariants out;
  out.c_z = std::conj(i_cz_bar / kI);
  out.c_theta = (minus_i_ctheta / -kI).real();
  out.torsion = torsion;
  out.webster = -out.c_theta - 2.0 * std::norm(out.c_z);
  return out;
}

CRParameters rescale_b(const CRParameters& p, double lambda) {
  if (!(lambda > 0.0)) fail(Err::InvalidArgument, "rescale_b requires lambda > 0");
  return CRParameters(p.a, lambda * p.b, p.c);
}

Eigen::Matrix2d lie_derivative_reeb_J(const NormalizedContactData& nd, double a,
                                      double c) {
  if (!(c > 0.0)) fail(Err::InvalidArgument, "lie_derivative_reeb_J requires c > 0");
  StructureConstants sc = nd.constants();
  Eigen::Matrix2d j = j_endomorphism(a, c);
  Eigen::Vector3d reeb(1.0, 0.0, 0.0);

  auto applyJ = [&](const Eigen::Vector3d& w) {
    Eigen::Vector2d xy = j * Eigen::Vector2d(w[1], w[2]);
    return Eigen::Vector3d(0.0, xy[0], xy[1]);
  };

  Eigen::Matrix2d out;
  const Eigen::Vector3d frame[2] = {{0, 1, 0}, {0, 0, 1}};
  for (int col = 0; col < 2; ++col) {
    Eigen::Vector3d lhs = sc.bracket(reeb, applyJ(frame[col])) -
                          applyJ(sc.bracket(reeb, frame[col]));
    // the adapted basis has c^1_12 = c^1_13 = 0, so no Reeb component appears
    out(0, col) = lhs[1];
    out(1, col) = lhs[2];
  }
  return out;
}

Eigen::Matrix2d torsion_matrix(double a, double c, Complex a11) {
  double re = a11.real(), im = a11.imag();
  double a21 = a * a + 1.0;
  Eigen::Matrix2d m;
  m(0, 0) = re + a * im;
  m(0, 1) = -im * a21 / c;
  m(1, 0) = -(re * (-2.0 * a * c / a21) + im * (1.0 - a * a) * c / a21);
  m(1, 1) = -(re + a * im);
  return m;
}

} // namespace tflow
