#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tflow {

namespace {

constexpr double kTauMin = 1e-9;
constexpr double kPi = 3.14159265358979323846;

// Integrator state layout per flow kind. tau is never integrated: it is
// linear in t, and for the coupled W-flows the singular tau^{-1} part of
// phi' is integrated in closed form (phi = phi_reg - 2 ln(tau/tau0)), which
// removes the stiff tail near tau = 0 and keeps the constraint cancellation
// structural.
struct System {
  FlowKind kind;
  const NormalizedContactData* nd;
  double tau0 = 0.0;
  double B_frozen = 1.0;
  std::optional<double> phi_frozen;
  std::optional<double> tau_frozen;
  int n = 0;

  double tau_at(double t) const {
    return kind == FlowKind::CoupledWPlus ? tau0 + 2.0 * t : tau0 - 2.0 * t;
  }

  FlowState state_at(double t, const double* y) const {
    FlowState s;
    s.a = y[0];
    s.c = y[1];
    switch (kind) {
      case FlowKind::Normalized:
        s.B = B_frozen;
        s.phi = phi_frozen;
        s.tau = tau_frozen;
        break;
      case FlowKind::Unnormalized:
        s.B = y[2];
        s.phi = phi_frozen;
        s.tau = tau_frozen;
        break;
      case FlowKind::CoupledF:
        s.B = y[2];
        s.phi = y[3];
        s.tau = tau_frozen;
        break;
      case FlowKind::CoupledWPlus:
      case FlowKind::CoupledWMinus: {
        s.B = y[2];
        double tau = tau_at(t);
        s.tau = tau;
        s.phi = y[3] - 2.0 * std::log(tau / tau0);
        break;
      }
    }
    return s;
  }

  void deriv(double t, const double* y, double* dy) const {
    FlowState s = state_at(t, y);
    if (kind == FlowKind::CoupledWPlus || kind == FlowKind::CoupledWMinus) {
      s.require_domain();
      PseudohermitianInvariants inv =
          invariants_closed_form(*nd, CRParameters(s.a, std::sqrt(s.B), s.c));
      j_part(s.a, s.c, std::conj(inv.torsion), dy[0], dy[1]);
      dy[2] = 2.0 * inv.webster * s.B;
      dy[3] = 4.0 * inv.webster; // phi_reg carries only the smooth part
      return;
    }
    FlowDerivative d = rhs(kind, *nd, s);
    dy[0] = d.da;
    dy[1] = d.dc;
    if (n > 2) dy[2] = d.dB;
    if (n > 3) dy[3] = d.dphi;
  }
};

System make_system(FlowKind kind, const NormalizedContactData& nd, const FlowState& s0,
                   double* y0) {
  s0.require_fields(kind);
  s0.require_domain();
  System sys;
  sys.kind = kind;
  sys.nd = &nd;
  y0[0] = s0.a;
  y0[1] = s0.c;
  switch (kind) {
    case FlowKind::Normalized:
      sys.n = 2;
      sys.B_frozen = s0.B;
      sys.phi_frozen = s0.phi;
      sys.tau_frozen = s0.tau;
      break;
    case FlowKind::Unnormalized:
      sys.n = 3;
      y0[2] = s0.B;
      sys.phi_frozen = s0.phi;
      sys.tau_frozen = s0.tau;
      break;
    case FlowKind::CoupledF:
      sys.n = 4;
      y0[2] = s0.B;
      y0[3] = *s0.phi;
      sys.tau_frozen = s0.tau;
      break;
    case FlowKind::CoupledWPlus:
    case FlowKind::CoupledWMinus:
      sys.n = 4;
      y0[2] = s0.B;
      y0[3] = *s0.phi; // phi_reg(0) = phi(0)
      sys.tau0 = *s0.tau;
      break;
  }
  return sys;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = kB1 - 5179.0 / 57600, kE3 = kB3 - 7571.0 / 16695,
                 kE4 = kB4 - 393.0 / 640, kE5 = kB5 + 92097.0 / 339200,
                 kE6 = kB6 - 187.0 / 2100, kE7 = -1.0 / 40;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
// dense-output weights (fourth-order continuous extension)
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

// One accepted step with its interpolation polynomial
// y(s) = r1 + s (r2 + (1-s)(r3 + s (r4 + (1-s) r5))), exact at both ends.
struct Segment {
  double t0, t1;
  double r1[4], r2[4], r3[4], r4[4], r5[4];
};

void dense_eval(const Segment& seg, double t, int n, double* out) {
  double s = (t - seg.t0) / (seg.t1 - seg.t0);
  double s1 = 1.0 - s;
  for (int i = 0; i < n; ++i)
    out[i] = seg.r1[i] +
             s * (seg.r2[i] + s1 * (seg.r3[i] + s * (seg.r4[i] + s1 * seg.r5[i])));
}

struct FieldView {
  const char* name;
  double value;
};

std::vector<FieldView> fields_of(const System& sys, const FlowState& s) {
  std::vector<FieldView> v = {{"a", s.a}, {"c", s.c}};
  if (sys.kind != FlowKind::Normalized) v.push_back({"B", s.B});
  if (s.phi) v.push_back({"phi", *s.phi});
  if (s.tau) v.push_back({"tau", *s.tau});
  return v;
}

} // namespace

std::pair<double, double> pdq_closed_form(double K, double c0, double b0, double t) {
  if (!(c0 > 0.0) || !(b0 > 0.0))
    fail(Err::InvalidArgument, "pdq closed form requires c0 > 0 and b0 > 0");
  double kc2 = K * c0 * c0;
  if (std::abs(kc2 - 1.0) < 1e-14 * std::max(1.0, std::abs(kc2)))
    return {c0, b0 * b0 - t / c0 * (c0 * c0 * K + 1.0)};
  double s = (1.0 - kc2) * t / (b0 * b0 * c0);
  double es = std::exp(s);
  double c = c0 * es;
  double B = (kc2 * es * es - 1.0) / ((kc2 - 1.0) * es) * b0 * b0;
  return {c, B};
}

std::optional<double> pdq_domain_exit_time(double K, double c0, double b0) {
  if (!(c0 > 0.0) || !(b0 > 0.0))
    fail(Err::InvalidArgument, "pdq closed form requires c0 > 0 and b0 > 0");
  if (K <= 0.0) return std::nullopt;
  double kc2 = K * c0 * c0;
  if (std::abs(kc2 - 1.0) < 1e-14 * std::max(1.0, kc2))
    return b0 * b0 * c0 / (kc2 + 1.0);
  double s_star = -0.5 * std::log(kc2);
  return s_star * b0 * b0 * c0 / (1.0 - kc2);
}

std::pair<double, double> prequant_closed_form(double K, double c0, double B0,
                                               double t) {
  if (K == 0.0) fail(Err::InvalidArgument, "prequantization requires K != 0");
  if (!(c0 > 0.0) || !(B0 > 0.0))
    fail(Err::InvalidArgument, "prequant closed form requires c0 > 0 and B0 > 0");
  double k2c2 = K * K * c0 * c0;
  if (std::abs(k2c2 - 1.0) < 1e-14 * std::max(1.0, k2c2))
    return {c0, B0 - 2.0 * std::abs(K) / K * t};
  double s = (1.0 - k2c2) * t / (B0 * c0 * K);
  double es = std::exp(s);
  return {c0 * es, B0 * (1.0 - k2c2 * es * es) / ((1.0 - k2c2) * es)};
}

std::optional<double> normalized_a0_blowup_time(double K, double c0) {
  if (!(c0 > 0.0)) fail(Err::InvalidArgument, "requires c0 > 0");
  if (K >= 0.0) return std::nullopt;
  double k = std::sqrt(-K);
  return (kPi / 2.0 - std::atan(k * c0)) / k;
}

double normalized_a0_closed_form(double K, double c0, double t) {
  if (!(c0 > 0.0)) fail(Err::InvalidArgument, "requires c0 > 0");
  if (K == 0.0) return c0 + t;
  if (K > 0.0) {
    double k = std::sqrt(K);
    double th = std::tanh(k * t);
    return (c0 * k + th) / (1.0 + c0 * k * th) / k;
  }
  double k = std::sqrt(-K);
  double t_star = (kPi / 2.0 - std::atan(k * c0)) / k;
  if (t >= t_star) {
    std::ostringstream os;
    os << "normalized a=0 flow blows up at t = " << t_star;
    fail(Err::Domain, os.str());
  }
  return std::tan(k * t + std::atan(k * c0)) / k;
}

Preset preset(const std::string& name, double param) {
  FlowState init;
  init.a = 0.0;
  init.c = 1.0;
  init.B = 1.0;
  if (name == "pdq")
    return {name, NormalizedContactData(-param, 0.0, 1.0, 0.0), init};
  if (name == "prequant") {
    if (param == 0.0) fail(Err::InvalidArgument, "prequant requires K != 0");
    return {name, NormalizedContactData(-param, 0.0, 1.0 / param, 0.0), init};
  }
  if (name == "heisenberg")
    return {name, NormalizedContactData(0.0, 0.0, 0.0, 0.0), init};
  if (name == "rossi") {
    if (!(param >= 0.0 && param < 1.0))
      fail(Err::InvalidArgument, "rossi requires t in [0, 1)");
    init.c = (1.0 - param) / (1.0 + param);
    init.B = 0.5; // b = 1/sqrt(2)
    return {name, NormalizedContactData(-1.0, 0.0, 1.0, 0.0), init};
  }
  if (name == "su2")
    return {name, NormalizedContactData(-1.0, 0.0, 1.0, 0.0), init};
  if (name == "sl2_hyperbolic")
    return {name, NormalizedContactData(1.0, 0.0, -1.0, 0.0), init};
  fail(Err::UnknownPreset, "unknown preset '" + name + "'");
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "pdq", "prequant", "heisenberg", "rossi", "su2", "sl2_hyperbolic"};
  return names;
}

namespace {

class Integrator {
public:
  Integrator(const System& sys, const IntegrateOptions& opts) : sys_(sys), opts_(opts) {}

  Trajectory run(const double* y0, double t_end) {
    std::copy(y0, y0 + sys_.n, y_init_);
    double cap = t_end;
    bool tau_capped = false;
    if (sys_.kind == FlowKind::CoupledWMinus) {
      double t_tau = (sys_.tau0 - kTauMin) / 2.0;
      if (t_tau <= 0.0) fail(Err::Domain, "tau0 must exceed tau_min");
      if (t_tau < cap) {
        cap = t_tau;
        tau_capped = true;
      }
    }

    double t = 0.0;
    double y[4], f[4];
    std::copy(y0, y0 + sys_.n, y);
    sys_.deriv(t, y, f);

    TerminalEvent ev{TerminalEvent::Kind::Completed, cap, "", 0.0, 0.0};
    bool done = false;

    FixedPointSet fps{FixedPointSet::Kind::None, {}};
    if (sys_.kind == FlowKind::Normalized) fps = fixed_points(*sys_.nd);

    bool fixed_step = opts_.fixed_dt > 0.0;
    double dt = fixed_step ? opts_.fixed_dt : std::min(cap, 1e-2);
    long steps = 0;
    const long max_steps = 2000000;

    while (!done) {
      if (t >= cap * (1.0 - 1e-15) || cap - t < opts_.dt_min) {
        ev.kind = tau_capped ? TerminalEvent::Kind::DomainExit
                             : TerminalEvent::Kind::Completed;
        ev.time = cap;
        if (tau_capped) ev.field = "tau";
        break;
      }
      if (++steps > max_steps) fail(Err::Internal, "integrator exceeded step budget");
      dt = std::min(dt, cap - t);

      double k2[4], k3[4], k4[4], k5[4], k6[4], k7[4], ytmp[4], ynew[4], err[4];
      bool stage_ok = true;
      try {
        if (fixed_step) {
          // classic RK4, endpoint derivative appended for the dense output
          for (int i = 0; i < sys_.n; ++i) ytmp[i] = y[i] + 0.5 * dt * f[i];
          sys_.deriv(t + 0.5 * dt, ytmp, k2);
          for (int i = 0; i < sys_.n; ++i) ytmp[i] = y[i] + 0.5 * dt * k2[i];
          sys_.deriv(t + 0.5 * dt, ytmp, k3);
          for (int i = 0; i < sys_.n; ++i) ytmp[i] = y[i] + dt * k3[i];
          sys_.deriv(t + dt, ytmp, k4);
          for (int i = 0; i < sys_.n; ++i)
            ynew[i] = y[i] + dt / 6.0 * (f[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
          sys_.deriv(t + dt, ynew, k7);
        } else {
          for (int i = 0; i < sys_.n; ++i) ytmp[i] = y[i] + dt * kA21 * f[i];
          sys_.deriv(t + kC2 * dt, ytmp, k2);
          for (int i = 0; i < sys_.n; ++i)
            ytmp[i] = y[i] + dt * (kA31 * f[i] + kA32 * k2[i]);
          sys_.deriv(t + kC3 * dt, ytmp, k3);
          for (int i = 0; i < sys_.n; ++i)
            ytmp[i] = y[i] + dt * (kA41 * f[i] + kA42 * k2[i] + kA43 * k3[i]);
          sys_.deriv(t + kC4 * dt, ytmp, k4);
          for (int i = 0; i < sys_.n; ++i)
            ytmp[i] =
                y[i] + dt * (kA51 * f[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
          sys_.deriv(t + kC5 * dt, ytmp, k5);
          for (int i = 0; i < sys_.n; ++i)
            ytmp[i] = y[i] + dt * (kA61 * f[i] + kA62 * k2[i] + kA63 * k3[i] +
                                   kA64 * k4[i] + kA65 * k5[i]);
          sys_.deriv(t + dt, ytmp, k6);
          for (int i = 0; i < sys_.n; ++i)
            ynew[i] = y[i] + dt * (kB1 * f[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] +
                                   kB6 * k6[i]);
          sys_.deriv(t + dt, ynew, k7);
        }
      } catch (const Error&) {
        stage_ok = false; // stage left the domain; shrink and retry
      }

      double errnorm = 0.0;
      if (stage_ok && !fixed_step) {
        for (int i = 0; i < sys_.n; ++i)
          err[i] = dt * (kE1 * f[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                         kE6 * k6[i] + kE7 * k7[i]);
        for (int i = 0; i < sys_.n; ++i) {
          double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
          errnorm += (err[i] / sc) * (err[i] / sc);
        }
        errnorm = std::sqrt(errnorm / sys_.n);
        if (!std::isfinite(errnorm)) stage_ok = false;
      }
      if (stage_ok && fixed_step) {
        for (int i = 0; i < sys_.n; ++i)
          if (!std::isfinite(ynew[i])) stage_ok = false;
      }

      if (!fixed_step && (!stage_ok || errnorm > 1.0)) {
        double fac = stage_ok ? std::max(0.2, 0.9 * std::pow(errnorm, -0.2)) : 0.5;
        dt *= std::min(fac, 0.9);
        if (dt < opts_.dt_min) {
          classify_underflow(t, y, ev);
          done = true;
        }
        continue;
      }
      if (fixed_step && !stage_ok) {
        classify_underflow(t, y, ev);
        break;
      }

      Segment seg;
      seg.t0 = t;
      seg.t1 = t + dt;
      for (int i = 0; i < sys_.n; ++i) {
        double dy = ynew[i] - y[i];
        seg.r1[i] = y[i];
        seg.r2[i] = dy;
        seg.r3[i] = dt * f[i] - dy;
        seg.r4[i] = dy - dt * k7[i] - seg.r3[i];
        seg.r5[i] = fixed_step ? 0.0
                               : dt * (kD1 * f[i] + kD3 * k3[i] + kD4 * k4[i] +
                                       kD5 * k5[i] + kD6 * k6[i] + kD7 * k7[i]);
      }

      // Domain crossing inside the accepted step (c or B through zero).
      int crossed = -1;
      for (int i = 1; i < std::min(sys_.n, 3); ++i)
        if (ynew[i] <= 0.0 && crossed < 0) crossed = i;
      if (crossed >= 0) {
        double t_cross = bisect_zero(seg, crossed);
        ev.kind = TerminalEvent::Kind::DomainExit;
        ev.time = t_cross;
        ev.field = crossed == 1 ? "c" : "B";
        done = true;
      } else {
        segments_.push_back(seg);
        t = seg.t1;
        std::copy(ynew, ynew + sys_.n, y);
        std::copy(k7, k7 + sys_.n, f);

        FlowState s = sys_.state_at(t, y);
        for (const auto& fv : fields_of(sys_, s)) {
          if (std::abs(fv.value) >= opts_.blowup_threshold) {
            ev.kind = TerminalEvent::Kind::BlowUp;
            ev.time = bisect_threshold(seg, t);
            ev.field = fv.name;
            done = true;
            break;
          }
        }
        if (!done && fps.kind == FixedPointSet::Kind::Isolated) {
          for (const auto& [pa, pc] : fps.points) {
            double dist = std::hypot(s.a - pa, s.c - pc);
            if (dist < opts_.convergence_radius) {
              double dy[4];
              sys_.deriv(t, y, dy);
              if (std::hypot(dy[0], dy[1]) < 1e-10) {
                ev.kind = TerminalEvent::Kind::Converged;
                ev.time = t;
                ev.point_a = pa;
                ev.point_c = pc;
                done = true;
                break;
              }
            }
          }
        }
        if (!fixed_step) {
          double fac = errnorm == 0.0 ? 5.0
                                      : std::clamp(0.9 * std::pow(errnorm, -0.2), 0.2, 5.0);
          dt *= fac;
        }
      }
    }

    return emit(ev);
  }

private:
  void classify_underflow(double t, const double* y, TerminalEvent& ev) {
    FlowState s = sys_.state_at(t, y);
    ev.time = t;
    double pos_min = std::min(s.c, s.B);
    if (pos_min <= 1e-6) {
      ev.kind = TerminalEvent::Kind::DomainExit;
      ev.field = s.c <= s.B ? "c" : "B";
      return;
    }
    ev.kind = TerminalEvent::Kind::BlowUp;
    double biggest = 0.0;
    for (const auto& fv : fields_of(sys_, s))
      if (std::abs(fv.value) > biggest) {
        biggest = std::abs(fv.value);
        ev.field = fv.name;
      }
  }

  double bisect_zero(const Segment& seg, int idx) {
    double lo = seg.t0, hi = seg.t1, out[4];
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      dense_eval(seg, mid, sys_.n, out);
      (out[idx] > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  double bisect_threshold(const Segment& seg, double fallback) {
    auto exceeds = [&](double tt) {
      double out[4];
      dense_eval(seg, tt, sys_.n, out);
      FlowState s = sys_.state_at(tt, out);
      for (const auto& fv : fields_of(sys_, s))
        if (std::abs(fv.value) >= opts_.blowup_threshold) return true;
      return false;
    };
    if (!exceeds(seg.t1)) return fallback;
    double lo = seg.t0, hi = seg.t1;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      (exceeds(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  void push_sample(Trajectory& traj, double tt, const FlowState& s) const {
    TrajectorySample sample;
    sample.t = tt;
    sample.state = s;
    PseudohermitianInvariants inv =
        invariants_closed_form(*sys_.nd, CRParameters(s.a, std::sqrt(s.B), s.c));
    sample.torsion = inv.torsion;
    sample.webster = inv.webster;
    sample.einstein_hilbert = inv.webster * s.B * s.B;
    traj.samples.push_back(sample);
  }

  Trajectory emit(const TerminalEvent& ev) {
    Trajectory traj;
    traj.kind = sys_.kind;
    traj.event = ev;

    if (segments_.empty()) {
      push_sample(traj, 0.0, sys_.state_at(0.0, y_init_));
      return traj;
    }

    double t_last = segments_.back().t1;
    int n_samples = std::max(2, opts_.samples);
    for (int i = 0; i < n_samples; ++i) {
      double tt = t_last * i / (n_samples - 1);
      size_t lo = 0, hi = segments_.size() - 1;
      while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        if (segments_[mid].t1 < tt)
          lo = mid + 1;
        else
          hi = mid;
      }
      double yv[4];
      dense_eval(segments_[lo], std::min(tt, segments_[lo].t1), sys_.n, yv);
      push_sample(traj, tt, sys_.state_at(tt, yv));
    }
    return traj;
  }

  System sys_;
  IntegrateOptions opts_;
  std::vector<Segment> segments_;
  double y_init_[4] = {0, 0, 0, 0};
};

} // namespace

Trajectory integrate(FlowKind kind, const NormalizedContactData& nd, const FlowState& s0,
                     double t_end, const IntegrateOptions& opts) {
  if (!(t_end > 0.0)) fail(Err::InvalidArgument, "t_end must be positive");
  if (!(opts.rtol > 0.0) || !(opts.atol > 0.0) || opts.samples < 2 ||
      !(opts.blowup_threshold > 0.0))
    fail(Err::InvalidArgument, "invalid integrator options");
  double y0[4];
  System sys = make_system(kind, nd, s0, y0);
  Integrator integrator(sys, opts);
  return integrator.run(y0, t_end);
}

} // namespace tflow
