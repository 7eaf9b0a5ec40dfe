// extern "C" surface of the shared library. Exceptions from the core are
// mapped to status codes here; the detail message is kept per thread.

#include "torsionflow/torsionflow.h"

#include <cstdio>
#include <cstring>
#include <new>
#include <string>

#include "../core/entropy.hpp"
#include "../core/solver.hpp"
#include "../core/verify.hpp"

using namespace tflow;

struct tf_contact {
  NormalizedContactData data;
};

struct tf_trajectory {
  Trajectory traj;
};

struct tf_entropy_report {
  MonotonicityReport rep;
};

namespace {

thread_local std::string g_last_error;

tf_status status_of(Err e) {
  switch (e) {
    case Err::InvalidArgument: return TF_ERR_INVALID_ARGUMENT;
    case Err::Antisymmetry: return TF_ERR_ANTISYMMETRY;
    case Err::Jacobi: return TF_ERR_JACOBI;
    case Err::NotContact: return TF_ERR_NOT_CONTACT;
    case Err::Normalization: return TF_ERR_NORMALIZATION;
    case Err::MissingField: return TF_ERR_MISSING_FIELD;
    case Err::Domain: return TF_ERR_DOMAIN;
    case Err::Constraint: return TF_ERR_CONSTRAINT;
    case Err::UnknownPreset: return TF_ERR_UNKNOWN_PRESET;
    case Err::Internal: return TF_ERR_INTERNAL;
  }
  return TF_ERR_INTERNAL;
}

template <typename Fn>
tf_status guarded(Fn&& fn) {
  try {
    fn();
    return TF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TF_ERR_INTERNAL;
  }
}

tf_status require(bool cond, const char* message) {
  if (cond) return TF_OK;
  g_last_error = message;
  return TF_ERR_INVALID_ARGUMENT;
}

FlowState state_from(const tf_state& s) {
  FlowState out;
  out.a = s.a;
  out.c = s.c;
  out.B = s.B;
  if (s.has_phi) out.phi = s.phi;
  if (s.has_tau) out.tau = s.tau;
  return out;
}

tf_state state_to(const FlowState& s) {
  tf_state out{};
  out.a = s.a;
  out.c = s.c;
  out.B = s.B;
  out.has_phi = s.phi.has_value();
  out.phi = s.phi.value_or(0.0);
  out.has_tau = s.tau.has_value();
  out.tau = s.tau.value_or(0.0);
  return out;
}

FlowKind kind_from(tf_flow_kind k) {
  switch (k) {
    case TF_FLOW_UNNORMALIZED: return FlowKind::Unnormalized;
    case TF_FLOW_NORMALIZED: return FlowKind::Normalized;
    case TF_FLOW_COUPLED_F: return FlowKind::CoupledF;
    case TF_FLOW_COUPLED_W_PLUS: return FlowKind::CoupledWPlus;
    case TF_FLOW_COUPLED_W_MINUS: return FlowKind::CoupledWMinus;
  }
  fail(Err::InvalidArgument, "unknown flow kind");
}

EntropyKind entropy_from(tf_entropy_kind k) {
  switch (k) {
    case TF_ENTROPY_EINSTEIN_HILBERT: return EntropyKind::EinsteinHilbert;
    case TF_ENTROPY_F: return EntropyKind::F;
    case TF_ENTROPY_W_PLUS: return EntropyKind::WPlus;
    case TF_ENTROPY_W_MINUS: return EntropyKind::WMinus;
  }
  fail(Err::InvalidArgument, "unknown entropy kind");
}

tf_event event_to(const TerminalEvent& ev) {
  tf_event out{};
  switch (ev.kind) {
    case TerminalEvent::Kind::Completed: out.kind = TF_EVENT_COMPLETED; break;
    case TerminalEvent::Kind::Converged: out.kind = TF_EVENT_CONVERGED; break;
    case TerminalEvent::Kind::BlowUp: out.kind = TF_EVENT_BLOW_UP; break;
    case TerminalEvent::Kind::DomainExit: out.kind = TF_EVENT_DOMAIN_EXIT; break;
  }
  out.time = ev.time;
  std::snprintf(out.field, sizeof(out.field), "%s", ev.field.c_str());
  out.point_a = ev.point_a;
  out.point_c = ev.point_c;
  return out;
}

} // namespace

extern "C" {

const char* tf_version(void) { return "1.0.0"; }

const char* tf_last_error(void) { return g_last_error.c_str(); }

tf_status tf_contact_preset(const char* name, double param, tf_contact** out,
                            tf_state* state0) {
  if (tf_status s = require(name && out, "name and out must be non-null")) return s;
  return guarded([&] {
    Preset p = preset(name, param);
    *out = new tf_contact{p.data};
    if (state0) *state0 = state_to(p.initial);
  });
}

tf_status tf_contact_normalized(double c2_13, double c2_23, double c3_12, double c3_23,
                                tf_contact** out) {
  if (tf_status s = require(out != nullptr, "out must be non-null")) return s;
  return guarded([&] {
    *out = new tf_contact{NormalizedContactData(c2_13, c2_23, c3_12, c3_23)};
  });
}

tf_status tf_contact_raw(const double c[27], const double theta[3], tf_contact** out) {
  if (tf_status s = require(c && theta && out, "arguments must be non-null")) return s;
  return guarded([&] {
    std::array<double, 27> raw;
    std::memcpy(raw.data(), c, sizeof(raw));
    StructureConstants sc = StructureConstants::validate(raw);
    NormalizationResult res =
        normalize_frame(sc, Eigen::Vector3d(theta[0], theta[1], theta[2]));
    *out = new tf_contact{res.data};
  });
}

void tf_contact_free(tf_contact* nd) { delete nd; }

tf_status tf_contact_coefficients(const tf_contact* nd, double out[4]) {
  if (tf_status s = require(nd && out, "arguments must be non-null")) return s;
  out[0] = nd->data.c2_13();
  out[1] = nd->data.c2_23();
  out[2] = nd->data.c3_12();
  out[3] = nd->data.c3_23();
  return TF_OK;
}

tf_status tf_contact_classify(const tf_contact* nd, tf_geometry* geometry,
                              int* admits_torsion_free, int* unimodular) {
  if (tf_status s = require(nd != nullptr, "contact handle must be non-null")) return s;
  return guarded([&] {
    GeometryClass g = classify_geometry(nd->data);
    if (geometry) *geometry = static_cast<tf_geometry>(g.geometry);
    if (admits_torsion_free) *admits_torsion_free = g.admits_torsion_free ? 1 : 0;
    if (unimodular) *unimodular = nd->data.is_unimodular() ? 1 : 0;
  });
}

tf_status tf_contact_fixed_points(const tf_contact* nd, tf_fixed_points_kind* kind,
                                  double* a, double* c) {
  if (tf_status s = require(nd && kind, "arguments must be non-null")) return s;
  return guarded([&] {
    FixedPointSet fp = fixed_points(nd->data);
    switch (fp.kind) {
      case FixedPointSet::Kind::None: *kind = TF_FIXED_POINTS_NONE; break;
      case FixedPointSet::Kind::Isolated: *kind = TF_FIXED_POINTS_ISOLATED; break;
      case FixedPointSet::Kind::All: *kind = TF_FIXED_POINTS_ALL; break;
    }
    if (fp.kind == FixedPointSet::Kind::Isolated) {
      if (a) *a = fp.points[0].first;
      if (c) *c = fp.points[0].second;
    }
  });
}

tf_status tf_contact_dynamics(const tf_contact* nd, tf_dynamics* out) {
  if (tf_status s = require(nd && out, "arguments must be non-null")) return s;
  return guarded([&] {
    *out = static_cast<tf_dynamics>(classify_dynamics(nd->data));
  });
}

tf_status tf_invariants_compute(const tf_contact* nd, double a, double b, double c,
                                int use_oracle, tf_invariants* out) {
  if (tf_status s = require(nd && out, "arguments must be non-null")) return s;
  return guarded([&] {
    CRParameters p(a, b, c);
    PseudohermitianInvariants inv = use_oracle
                                        ? invariants_from_structure_equations(nd->data, p)
                                        : invariants_closed_form(nd->data, p);
    out->c_theta = inv.c_theta;
    out->c_z_re = inv.c_z.real();
    out->c_z_im = inv.c_z.imag();
    out->torsion_re = inv.torsion.real();
    out->torsion_im = inv.torsion.imag();
    out->webster = inv.webster;
  });
}

tf_status tf_flow_rhs(const tf_contact* nd, tf_flow_kind kind, const tf_state* s,
                      tf_state* out) {
  if (tf_status st = require(nd && s && out, "arguments must be non-null")) return st;
  return guarded([&] {
    FlowState state = state_from(*s);
    FlowDerivative d = rhs(kind_from(kind), nd->data, state);
    *out = tf_state{};
    out->a = d.da;
    out->c = d.dc;
    out->B = d.dB;
    out->phi = d.dphi;
    out->tau = d.dtau;
    out->has_phi = s->has_phi;
    out->has_tau = s->has_tau;
  });
}

tf_status tf_phase_field(const tf_contact* nd, double a_lo, double a_hi, double c_lo,
                         double c_hi, int na, int nc, double* buffer) {
  if (tf_status s = require(nd && buffer, "arguments must be non-null")) return s;
  return guarded([&] {
    auto nodes = phase_field(nd->data, a_lo, a_hi, c_lo, c_hi, na, nc);
    size_t i = 0;
    for (const auto& node : nodes) {
      buffer[i++] = node.a;
      buffer[i++] = node.c;
      buffer[i++] = node.da;
      buffer[i++] = node.dc;
    }
  });
}

void tf_integrate_opts_default(tf_integrate_opts* opts) {
  if (!opts) return;
  IntegrateOptions d;
  opts->rtol = d.rtol;
  opts->atol = d.atol;
  opts->dt = 0.0;
  opts->blowup_threshold = d.blowup_threshold;
  opts->convergence_radius = d.convergence_radius;
  opts->samples = d.samples;
}

tf_status tf_integrate(const tf_contact* nd, tf_flow_kind kind, const tf_state* s0,
                       double t_end, const tf_integrate_opts* opts, tf_trajectory** out) {
  if (tf_status s = require(nd && s0 && out, "arguments must be non-null")) return s;
  return guarded([&] {
    IntegrateOptions io;
    if (opts) {
      io.rtol = opts->rtol;
      io.atol = opts->atol;
      io.fixed_dt = opts->dt;
      io.blowup_threshold = opts->blowup_threshold;
      io.convergence_radius = opts->convergence_radius;
      io.samples = opts->samples;
    }
    *out = new tf_trajectory{integrate(kind_from(kind), nd->data, state_from(*s0), t_end, io)};
  });
}

void tf_trajectory_free(tf_trajectory* traj) { delete traj; }

size_t tf_trajectory_size(const tf_trajectory* traj) {
  return traj ? traj->traj.samples.size() : 0;
}

tf_status tf_trajectory_sample(const tf_trajectory* traj, size_t i, tf_sample* out) {
  if (tf_status s = require(traj && out, "arguments must be non-null")) return s;
  if (tf_status s = require(i < traj->traj.samples.size(), "sample index out of range"))
    return s;
  const TrajectorySample& smp = traj->traj.samples[i];
  out->t = smp.t;
  out->state = state_to(smp.state);
  out->torsion_re = smp.torsion.real();
  out->torsion_im = smp.torsion.imag();
  out->webster = smp.webster;
  out->einstein_hilbert = smp.einstein_hilbert;
  return TF_OK;
}

tf_status tf_trajectory_event(const tf_trajectory* traj, tf_event* out) {
  if (tf_status s = require(traj && out, "arguments must be non-null")) return s;
  *out = event_to(traj->traj.event);
  return TF_OK;
}

tf_status tf_entropy_value(tf_entropy_kind kind, const tf_state* s, double W, double vol0,
                           double* out) {
  if (tf_status st = require(s && out, "arguments must be non-null")) return st;
  return guarded([&] {
    EntropyConfig cfg(entropy_from(kind), vol0);
    *out = functional_value(cfg, state_from(*s), W);
  });
}

tf_status tf_entropy_constraint(tf_entropy_kind kind, const tf_state* s, double vol0,
                                double* out) {
  if (tf_status st = require(s && out, "arguments must be non-null")) return st;
  return guarded([&] {
    EntropyConfig cfg(entropy_from(kind), vol0);
    *out = constraint_value(cfg.kind, state_from(*s), cfg);
  });
}

tf_status tf_entropy_run(const tf_contact* nd, tf_flow_kind kind, const tf_state* s0,
                         double t_end, double vol0, int samples,
                         tf_entropy_report** out) {
  if (tf_status s = require(nd && s0 && out, "arguments must be non-null")) return s;
  return guarded([&] {
    EntropyConfig cfg(EntropyKind::EinsteinHilbert, vol0);
    *out = new tf_entropy_report{run_with_report(kind_from(kind), nd->data,
                                                 state_from(*s0), t_end, cfg,
                                                 samples > 0 ? samples : 401)};
  });
}

void tf_entropy_report_free(tf_entropy_report* rep) { delete rep; }

size_t tf_entropy_report_size(const tf_entropy_report* rep) {
  return rep ? rep->rep.samples.size() : 0;
}

tf_status tf_entropy_report_sample(const tf_entropy_report* rep, size_t i,
                                   tf_entropy_sample* out) {
  if (tf_status s = require(rep && out, "arguments must be non-null")) return s;
  if (tf_status s = require(i < rep->rep.samples.size(), "sample index out of range"))
    return s;
  const MonotonicitySample& ms = rep->rep.samples[i];
  out->t = ms.t;
  out->value = ms.value;
  out->derivative = ms.derivative;
  out->rhs_unweighted = ms.rhs_unweighted;
  out->rhs_weighted = ms.rhs_weighted;
  out->constraint = ms.constraint;
  return TF_OK;
}

tf_status tf_entropy_report_summary(const tf_entropy_report* rep, double* max_violation,
                                    double* constraint_drift, tf_weighting* matched,
                                    tf_event* terminal) {
  if (tf_status s = require(rep != nullptr, "report handle must be non-null")) return s;
  if (max_violation) *max_violation = rep->rep.max_violation;
  if (constraint_drift) *constraint_drift = rep->rep.constraint_drift;
  if (matched) *matched = static_cast<tf_weighting>(rep->rep.matched);
  if (terminal) *terminal = event_to(rep->rep.terminal);
  return TF_OK;
}

tf_status tf_verify_run(uint64_t seed, int cases, int inject_fault, tf_verify_callback cb,
                        void* user, int* failures) {
  return guarded([&] {
    verify::Options opts;
    opts.seed = seed;
    opts.cases = cases;
    opts.inject_fault = inject_fault != 0;
    int failed = verify::run_all(opts, [&](const verify::Result& r) {
      if (cb) cb(r.name.c_str(), r.pass ? 1 : 0, r.detail.c_str(), user);
    });
    if (failures) *failures = failed;
  });
}

} // extern "C"
