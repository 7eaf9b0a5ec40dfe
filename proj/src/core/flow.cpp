#include "flow.hpp"

#include <cmath>
#include <sstream>

namespace tflow {

const char* flow_kind_name(FlowKind k) {
  switch (k) {
    case FlowKind::Unnormalized: return "unnormalized";
    case FlowKind::Normalized: return "normalized";
    case FlowKind::CoupledF: return "f";
    case FlowKind::CoupledWPlus: return "wplus";
    case FlowKind::CoupledWMinus: return "wminus";
  }
  return "?";
}

void FlowState::require_domain() const {
  if (!(c > 0.0)) fail(Err::Domain, "flow state requires c > 0");
  if (!(B > 0.0)) fail(Err::Domain, "flow state requires B > 0");
  if (tau && !(*tau > 0.0)) fail(Err::Domain, "flow state requires tau > 0");
}

void FlowState::require_fields(FlowKind kind) const {
  switch (kind) {
    case FlowKind::Unnormalized:
    case FlowKind::Normalized:
      return;
    case FlowKind::CoupledF:
      if (!phi) fail(Err::MissingField, "coupled F-flow requires phi");
      return;
    case FlowKind::CoupledWPlus:
    case FlowKind::CoupledWMinus:
      if (!phi || !tau) fail(Err::MissingField, "coupled W-flows require phi and tau");
      return;
  }
}

void j_part(double a, double c, Complex e11, double& da, double& dc) {
  double re = e11.real(), im = e11.imag();
  double a21 = a * a + 1.0;
  da = 2.0 * (re + a * im);
  dc = -2.0 * (re * (-2.0 * a * c / a21) + im * (1.0 - a * a) * c / a21);
}

FlowDerivative rhs(FlowKind kind, const NormalizedContactData& nd, const FlowState& s) {
  s.require_fields(kind);
  s.require_domain();
  FlowDerivative d;

  if (kind == FlowKind::Normalized) {
    double a = s.a, c = s.c;
    d.da = nd.c2_13() * a * c - nd.c3_12() * (a * a + 1.0) * a / c;
    d.dc = nd.c2_13() * c * c + nd.c3_12() * (1.0 - a * a);
    return d; // B is ignored; the theta-equation is trivial here
  }

  PseudohermitianInvariants inv =
      invariants_closed_form(nd, CRParameters(s.a, std::sqrt(s.B), s.c));
  Complex a11 = std::conj(inv.torsion);
  double w = inv.webster;

  switch (kind) {
    case FlowKind::Unnormalized:
      j_part(s.a, s.c, a11, d.da, d.dc);
      d.dB = -2.0 * w * s.B;
      break;
    case FlowKind::CoupledF: {
      double ephi = std::exp(*s.phi);
      double eta = ephi * w;
      j_part(s.a, s.c, ephi * a11, d.da, d.dc);
      d.dB = 2.0 * eta * s.B;
      d.dphi = 4.0 * eta;
      break;
    }
    case FlowKind::CoupledWPlus:
      j_part(s.a, s.c, a11, d.da, d.dc);
      d.dB = 2.0 * w * s.B;
      d.dphi = 4.0 * (w - 1.0 / *s.tau);
      d.dtau = 2.0;
      break;
    case FlowKind::CoupledWMinus:
      j_part(s.a, s.c, a11, d.da, d.dc);
      d.dB = 2.0 * w * s.B;
      d.dphi = 4.0 * (w + 1.0 / *s.tau);
      d.dtau = -2.0;
      break;
    case FlowKind::Normalized:
      break; // handled above
  }
  return d;
}

FixedPointSet fixed_points(const NormalizedContactData& nd) {
  double p = nd.c2_13(), q = nd.c3_12();
  if (p == 0.0 && q == 0.0) return {FixedPointSet::Kind::All, {}};
  if (p != 0.0) {
    double ratio = -q / p;
    if (ratio > 0.0)
      return {FixedPointSet::Kind::Isolated, {{0.0, std::sqrt(ratio)}}};
  }
  return {FixedPointSet::Kind::None, {}};
}

const char* dynamics_name(DynamicsClass d) {
  switch (d) {
    case DynamicsClass::Attracting: return "attracting";
    case DynamicsClass::Repelling: return "repelling";
    case DynamicsClass::Unclassified: return "unclassified";
  }
  return "?";
}

DynamicsClass classify_dynamics(const NormalizedContactData& nd) {
  if (nd.c3_12() > 0.0 && nd.c2_13() < 0.0) return DynamicsClass::Attracting;
  if (nd.c3_12() < 0.0 && nd.c2_13() > 0.0) return DynamicsClass::Repelling;
  return DynamicsClass::Unclassified;
}

std::vector<PhaseNode> phase_field(const NormalizedContactData& nd, double a_lo,
                                   double a_hi, double c_lo, double c_hi, int na,
                                   int nc) {
  if (!(c_lo > 0.0) || !(c_hi > 0.0))
    fail(Err::Domain, "phase_field requires a positive c-range");
  if (na < 1 || nc < 1) fail(Err::InvalidArgument, "phase_field grid must be >= 1x1");
  std::vector<PhaseNode> out;
  out.reserve(static_cast<size_t>(na) * nc);
  for (int i = 0; i < na; ++i) {
    double a = na == 1 ? a_lo : a_lo + (a_hi - a_lo) * i / (na - 1);
    for (int j = 0; j < nc; ++j) {
      double c = nc == 1 ? c_lo : c_lo + (c_hi - c_lo) * j / (nc - 1);
      FlowState s;
      s.a = a;
      s.c = c;
      FlowDerivative d = rhs(FlowKind::Normalized, nd, s);
      out.push_back({a, c, d.da, d.dc});
    }
  }
  return out;
}

namespace {

// Minimal fixed-step RK4 on (a, c, B) for the unnormalized flow; the adaptive
// integrator lives in the solver and would create a dependency cycle here.
FlowState advance_unnormalized(const NormalizedContactData& nd, FlowState s,
                               double t_end, double dt) {
  int n = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
  double h = t_end / n;
  auto f = [&](const FlowState& y) { return rhs(FlowKind::Unnormalized, nd, y); };
  auto step = [&](FlowState y, const FlowDerivative& k, double w) {
    y.a += w * k.da;
    y.c += w * k.dc;
    y.B += w * k.dB;
    return y;
  };
  for (int i = 0; i < n; ++i) {
    FlowDerivative k1 = f(s);
    FlowDerivative k2 = f(step(s, k1, h / 2));
    FlowDerivative k3 = f(step(s, k2, h / 2));
    FlowDerivative k4 = f(step(s, k3, h));
    s.a += h / 6 * (k1.da + 2 * k2.da + 2 * k3.da + k4.da);
    s.c += h / 6 * (k1.dc + 2 * k2.dc + 2 * k3.dc + k4.dc);
    s.B += h / 6 * (k1.dB + 2 * k2.dB + 2 * k3.dB + k4.dB);
  }
  return s;
}

PseudohermitianInvariants invariants_at(const NormalizedContactData& nd,
                                        const FlowState& s) {
  return invariants_closed_form(nd, CRParameters(s.a, std::sqrt(s.B), s.c));
}

} // namespace

int torsion_norm_weight() {
  // One-time calibration on pdq K = 0 from (a, c, B) = (0, 1, 1), where the
  // closed form is c = e^t, B = e^{-t} and d/dt (W B^2) = -e^{-2t}.
  static const int kappa = [] {
    NormalizedContactData pdq0(0.0, 0.0, 1.0, 0.0);
    double t = 0.5, h = 1e-5;
    auto eh = [&](double tt) {
      double c = std::exp(tt), B = std::exp(-tt);
      FlowState s;
      s.c = c;
      s.B = B;
      PseudohermitianInvariants inv = invariants_at(pdq0, s);
      return inv.webster * B * B;
    };
    double fd = (eh(t + h) - eh(t - h)) / (2.0 * h);
    FlowState s;
    s.c = std::exp(t);
    s.B = std::exp(-t);
    PseudohermitianInvariants inv = invariants_at(pdq0, s);
    double w = inv.webster, asq = std::norm(inv.torsion);
    double best = 0.0;
    int pick = 0;
    for (int k : {1, 2}) {
      double rhsval = -2.0 * (w * w + k * asq) * s.B * s.B;
      double rel = std::abs(fd - rhsval) / std::max(1e-30, std::abs(rhsval));
      if (pick == 0 || rel < best) {
        best = rel;
        pick = k;
      }
    }
    if (best > 1e-6)
      fail(Err::Internal, "torsion-norm calibration matched neither weight");
    return pick;
  }();
  return kappa;
}

VariationReport variation_identity_check(const NormalizedContactData& nd,
                                         const FlowState& s0, double h) {
  if (!(h >= 1e-6 && h <= 1e-3))
    fail(Err::InvalidArgument, "variation check step must lie in [1e-6, 1e-3]");
  s0.require_domain();

  int kappa = torsion_norm_weight();
  // RK4 global error ~ dt^4 stays far below the h^2 differencing error.
  double dt = 1e-4;
  double wres = 0.0, ares = 0.0;

  // Sample a handful of interior times along a short trajectory window.
  for (double t : {2 * h, 0.05, 0.1, 0.15, 0.2}) {
    FlowState sm = advance_unnormalized(nd, s0, t - h, dt);
    FlowState sc = advance_unnormalized(nd, s0, t, dt);
    FlowState sp = advance_unnormalized(nd, s0, t + h, dt);

    PseudohermitianInvariants im = invariants_at(nd, sm);
    PseudohermitianInvariants ic = invariants_at(nd, sc);
    PseudohermitianInvariants ip = invariants_at(nd, sp);

    double fd_w = (ip.webster - im.webster) / (2.0 * h);
    double rhs_w = 2.0 * (ic.webster * ic.webster - kappa * std::norm(ic.torsion));
    wres = std::max(wres, std::abs(fd_w - rhs_w));

    Complex a11m = std::conj(im.torsion), a11c = std::conj(ic.torsion),
            a11p = std::conj(ip.torsion);
    Complex fd_a = (a11p - a11m) / (2.0 * h);
    Complex a110 = 2.0 * Complex(0.0, 1.0) * ic.c_theta * a11c;
    Complex rhs_a = 2.0 * ic.webster * a11c - Complex(0.0, 1.0) * a110;
    ares = std::max(ares, std::abs(fd_a - rhs_a));
  }

  return {wres, ares, kappa};
}

} // namespace tflow
