#include "structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tflow {

namespace {

constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

} // namespace

int StructureConstants::pair_index(int j, int k) {
  if (j == 0 && k == 1) return 0;
  if (j == 0 && k == 2) return 1;
  if (j == 1 && k == 2) return 2;
  return -1;
}

StructureConstants::StructureConstants() {
  for (auto& row : c_)
    for (auto& v : row) v = 0.0;
}

StructureConstants StructureConstants::validate(const std::array<double, 27>& raw,
                                                double jacobi_tol) {
  auto at = [&raw](int i, int j, int k) { return raw[9 * i + 3 * j + k]; };
  StructureConstants sc;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (at(i, j, j) != 0.0)
        fail(Err::Antisymmetry, "c^" + fmt(i + 1) + "_{" + fmt(j + 1) + fmt(j + 1) +
                                    "} must vanish, got " + fmt(at(i, j, j)));
    }
    for (int p = 0; p < 3; ++p) {
      int j = kPairs[p][0], k = kPairs[p][1];
      if (at(i, j, k) != -at(i, k, j))
        fail(Err::Antisymmetry, "c^" + fmt(i + 1) + "_{" + fmt(j + 1) + fmt(k + 1) +
                                    "} != -c^" + fmt(i + 1) + "_{" + fmt(k + 1) +
                                    fmt(j + 1) + "}");
      sc.c_[i][p] = at(i, j, k);
    }
  }
  // Rescale to unit-size constants so the tolerance is scale-free.
  double scale = 1.0;
  for (const auto& row : sc.c_)
    for (double v : row) scale = std::max(scale, std::abs(v));
  double res = sc.jacobi_residual() / (scale * scale);
  if (res > jacobi_tol)
    fail(Err::Jacobi, "Jacobi identity violated, residual " + fmt(res));
  return sc;
}

StructureConstants StructureConstants::from_upper(const double upper[3][3],
                                                  double jacobi_tol) {
  std::array<double, 27> raw{};
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) {
      int j = kPairs[p][0], k = kPairs[p][1];
      raw[9 * i + 3 * j + k] = upper[i][p];
      raw[9 * i + 3 * k + j] = -upper[i][p];
    }
  return validate(raw, jacobi_tol);
}

double StructureConstants::coeff(int i, int j, int k) const {
  if (j == k) return 0.0;
  if (j < k) return c_[i][pair_index(j, k)];
  return -c_[i][pair_index(k, j)];
}

Eigen::Vector3d StructureConstants::bracket(const Eigen::Vector3d& x,
                                            const Eigen::Vector3d& y) const {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int p = 0; p < 3; ++p) {
      int j = kPairs[p][0], k = kPairs[p][1];
      s += c_[i][p] * (x[j] * y[k] - x[k] * y[j]);
    }
    out[i] = -s;
  }
  return out;
}

double StructureConstants::jacobi_residual() const {
  // [[X_a,X_b],X_c] + [[X_b,X_c],X_a] + [[X_c,X_a],X_b] over all triples.
  double worst = 0.0;
  Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cdx = 0; cdx < 3; ++cdx) {
        Eigen::Vector3d r = bracket(bracket(basis.col(a), basis.col(b)), basis.col(cdx)) +
                            bracket(bracket(basis.col(b), basis.col(cdx)), basis.col(a)) +
                            bracket(bracket(basis.col(cdx), basis.col(a)), basis.col(b));
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
  return worst;
}

bool StructureConstants::is_unimodular(double tol) const {
  // Tr ad_{X_i} = -sum_j c^j_{ij}; the sign does not matter for the test.
  for (int i = 0; i < 3; ++i) {
    double tr = 0.0;
    for (int j = 0; j < 3; ++j) tr += coeff(j, i, j);
    if (std::abs(tr) > tol) return false;
  }
  return true;
}

Eigen::Matrix3d StructureConstants::two_form(const Eigen::Vector3d& theta) const {
  Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) d(j, k) += theta[i] * coeff(i, j, k);
  return d;
}

double StructureConstants::contact_volume(const Eigen::Vector3d& theta) const {
  Eigen::Matrix3d d = two_form(theta);
  return theta[0] * d(1, 2) - theta[1] * d(0, 2) + theta[2] * d(0, 1);
}

Eigen::Vector3d reeb_vector(const StructureConstants& sc, const Eigen::Vector3d& theta) {
  double vol = sc.contact_volume(theta);
  if (std::abs(vol) < 1e-12)
    fail(Err::NotContact, "theta ^ d(theta) = " + fmt(vol) + ", not a contact form");
  Eigen::Matrix3d d = sc.two_form(theta);
  // d(theta)(T, .) = 0 and theta(T) = 1 combine into one invertible system:
  // rows of D^T give d(theta)(., X_k), the rank-one term pins theta(T).
  Eigen::Matrix3d m = d.transpose() + theta * theta.transpose();
  return m.partialPivLu().solve(theta);
}

NormalizedContactData::NormalizedContactData(double c2_13, double c2_23, double c3_12,
                                             double c3_23)
    : c2_13_(c2_13), c2_23_(c2_23), c3_12_(c3_12), c3_23_(c3_23) {
  // Closure of the coframe differentials forces these products to vanish.
  double scale = std::max({1.0, std::abs(c2_13), std::abs(c2_23), std::abs(c3_12),
                           std::abs(c3_23)});
  double tol = 1e-12 * scale * scale;
  if (std::abs(c2_13 * c3_23) > tol || std::abs(c3_12 * c2_23) > tol)
    fail(Err::Jacobi, "normalized coefficients violate the Jacobi identity: "
                      "c2_13*c3_23 and c3_12*c2_23 must vanish");
}

bool NormalizedContactData::is_unimodular(double tol) const {
  return std::abs(c2_23_) <= tol && std::abs(c3_23_) <= tol;
}

StructureConstants NormalizedContactData::constants() const {
  double upper[3][3] = {{0.0, 0.0, 1.0}, {0.0, c2_13_, c2_23_}, {c3_12_, 0.0, c3_23_}};
  return StructureConstants::from_upper(upper);
}

namespace {

// Coordinates of w in the symplectic basis (e2, e3) of ker(theta):
// x = d(theta)(w, e3), y = d(theta)(e2, w).
Eigen::Vector2d ker_coords(const Eigen::Matrix3d& d, const Eigen::Vector3d& e2,
                           const Eigen::Vector3d& e3, const Eigen::Vector3d& w) {
  return {w.dot(d * e3), e2.dot(d * w)};
}

} // namespace

NormalizationResult normalize_frame(const StructureConstants& sc,
                                    const Eigen::Vector3d& theta) {
  Eigen::Vector3d reeb = reeb_vector(sc, theta); // throws NotContact
  Eigen::Matrix3d d = sc.two_form(theta);

  // Symplectic basis of ker(theta) from the projection along the Reeb field.
  Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - reeb * theta.transpose();
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (proj.col(i).norm() > proj.col(best).norm()) best = i;
  Eigen::Vector3d u = proj.col(best);
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  double vnorm = -1.0;
  for (int i = 0; i < 3; ++i) {
    if (i == best) continue;
    Eigen::Vector3d w = proj.col(i) - u * (u.dot(proj.col(i)) / u.squaredNorm());
    if (w.norm() > vnorm) {
      vnorm = w.norm();
      v = w;
    }
  }
  double pairing = u.dot(d * v);
  if (std::abs(pairing) < 1e-14)
    fail(Err::NotContact, "d(theta) degenerates on ker(theta)");
  Eigen::Vector3d e2 = u, e3 = v / pairing; // d(theta)(e2, e3) = 1

  // Reference complex structure J e2 = e3, J e3 = -e2.
  auto applyJ = [&](const Eigen::Vector3d& w) {
    Eigen::Vector2d xy = ker_coords(d, e2, e3, w);
    return Eigen::Vector3d(xy[0] * e3 - xy[1] * e2);
  };
  auto lie_reeb = [&](const Eigen::Vector3d& w) {
    Eigen::Vector3d br = sc.bracket(reeb, w);
    return Eigen::Vector3d(br - reeb * theta.dot(br)); // stays in ker(theta)
  };

  // h = (1/2) L_T J on ker(theta), symmetric and trace-free in this basis.
  Eigen::Matrix2d h;
  const Eigen::Vector3d basis2[2] = {e2, e3};
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector3d col = 0.5 * (lie_reeb(applyJ(basis2[j])) - applyJ(lie_reeb(basis2[j])));
    h.col(j) = ker_coords(d, e2, e3, col);
  }
  double p = 0.5 * (h(0, 0) - h(1, 1));
  double q = 0.5 * (h(0, 1) + h(1, 0));
  double lambda = std::hypot(p, q);

  Eigen::Vector3d f2 = e2, f3 = e3;
  if (lambda > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    // Eigenvector of [[p, q], [q, -p]] for +lambda; pick the better-conditioned form.
    Eigen::Vector2d x(lambda + p, q);
    Eigen::Vector2d alt(q, lambda - p);
    if (alt.norm() > x.norm()) x = alt;
    x.normalize();
    f2 = x[0] * e2 + x[1] * e3;
    f3 = applyJ(f2);
  }
  double scale = f2.dot(d * f3); // = d(theta)(X, JX) > 0 for compatible J
  if (scale <= 0.0) fail(Err::Normalization, "d(theta)(X, JX) not positive");
  f2 /= std::sqrt(scale);
  f3 /= std::sqrt(scale);

  auto constants_of = [&sc](const Eigen::Matrix3d& frame) {
    Eigen::Matrix3d inv = frame.inverse();
    double upper[3][3];
    for (int pidx = 0; pidx < 3; ++pidx) {
      int j = kPairs[pidx][0], k = kPairs[pidx][1];
      Eigen::Vector3d comp = -(inv * sc.bracket(frame.col(j), frame.col(k)));
      for (int i = 0; i < 3; ++i) upper[i][pidx] = comp[i];
    }
    return std::array<std::array<double, 3>, 3>{
        {{upper[0][0], upper[0][1], upper[0][2]},
         {upper[1][0], upper[1][1], upper[1][2]},
         {upper[2][0], upper[2][1], upper[2][2]}}};
  };

  Eigen::Matrix3d frame;
  frame.col(0) = reeb;
  frame.col(1) = f2;
  frame.col(2) = f3;
  auto cu = constants_of(frame);

  double mag = 1.0;
  for (const auto& row : cu)
    for (double vv : row) mag = std::max(mag, std::abs(vv));
  double tol = 1e-9 * mag;

  // The classification table reads the pair (c^2_31, c^3_12); the eigenvector
  // order leaves an e2 <-> e3 swap free, which maps (p, q) -> (q, p). Swap so
  // zeros come first and the mixed pair is (-, +).
  {
    double pr = -cu[1][1], qr = cu[2][0];
    bool pz = std::abs(pr) <= tol, qz = std::abs(qr) <= tol;
    if ((!pz && qz) || (pr > tol && qr < -tol)) {
      Eigen::Vector3d t2 = frame.col(2), t3 = -frame.col(1);
      frame.col(1) = t2;
      frame.col(2) = t3;
      cu = constants_of(frame);
    }
  }

  if (std::abs(cu[0][2] - 1.0) > tol || std::abs(cu[0][0]) > tol ||
      std::abs(cu[0][1]) > tol || std::abs(cu[1][0]) > tol || std::abs(cu[2][1]) > tol)
    fail(Err::Normalization, "normalized coefficients failed the adapted-basis check");

  auto snap = [tol](double x) { return std::abs(x) <= tol ? 0.0 : x; };
  NormalizedContactData nd(snap(cu[1][1]), snap(cu[1][2]), snap(cu[2][0]),
                           snap(cu[2][2]));
  return {nd, frame};
}

const char* geometry_name(Geometry g) {
  switch (g) {
    case Geometry::SU2: return "SU(2)";
    case Geometry::SL2R_Hyperbolic: return "SL~(2,R) hyperbolic";
    case Geometry::SL2R_Mixed: return "SL~(2,R) mixed";
    case Geometry::E2: return "E(2)";
    case Geometry::E11: return "E(1,1)";
    case Geometry::Heisenberg: return "Heisenberg";
    case Geometry::NotUnimodular: return "not unimodular";
  }
  return "?";
}

GeometryClass classify_geometry(const NormalizedContactData& nd, double tol) {
  if (!nd.is_unimodular(tol)) return {Geometry::NotUnimodular, false};
  double p = nd.c2_31(), q = nd.c3_12();
  int sp = std::abs(p) <= tol ? 0 : (p > 0 ? 1 : -1);
  int sq = std::abs(q) <= tol ? 0 : (q > 0 ? 1 : -1);
  // The table pair is unordered (an e2 <-> e3 swap exchanges the entries).
  if (sp == 0 && sq == 0) return {Geometry::Heisenberg, true};
  if (sp > 0 && sq > 0) return {Geometry::SU2, true};
  if (sp < 0 && sq < 0) return {Geometry::SL2R_Hyperbolic, true};
  if (sp != 0 && sq != 0) return {Geometry::SL2R_Mixed, false};
  int s = sp + sq; // the nonzero sign
  return {s > 0 ? Geometry::E2 : Geometry::E11, false};
}

} // namespace tflow
