#ifndef TFLOW_ENTROPY_HPP
#define TFLOW_ENTROPY_HPP

#include "solver.hpp"

namespace tflow {

enum class EntropyKind { EinsteinHilbert, F, WPlus, WMinus };

struct EntropyConfig {
  EntropyKind kind = EntropyKind::EinsteinHilbert;
  double vol0 = 1.0; // base volume of theta ^ d(theta) at b = 1

  EntropyConfig() = default;
  EntropyConfig(EntropyKind k, double v) : kind(k), vol0(v) {
    if (!(vol0 > 0.0)) fail(Err::InvalidArgument, "vol0 must be positive");
  }
};

/// Functional value at homogeneous scope with spatially constant phi:
/// the measure total is B^2 vol0 and all gradient terms vanish.
///   E_H = W B^2 vol0
///   F   = W e^{-phi} B^2 vol0
///   W+- = [tau W +- phi/2 -+ 1] (4 pi tau)^{-2} e^{-phi} B^2 vol0
double functional_value(const EntropyConfig& cfg, const FlowState& s, double webster);

/// Conserved constraint: e^{-phi} B^2 vol0 (F) or
/// (4 pi tau)^{-2} e^{-phi} B^2 vol0 (W+-).
double constraint_value(EntropyKind kind, const FlowState& s, const EntropyConfig& cfg);

/// phi0 solving constraint = 1 at the initial state.
double solve_initial_phi(EntropyKind kind, const FlowState& s0, const EntropyConfig& cfg);

enum class Weighting { Unweighted, Weighted, Neither };

const char* weighting_name(Weighting w);

struct MonotonicitySample {
  double t;
  double value;
  double derivative;     // central finite difference, NaN at the two ends
  double rhs_unweighted; // theorem RHS against the measure without e^{-phi}
  double rhs_weighted;   // theorem RHS against the measure with e^{-phi}
  double constraint;
};

struct MonotonicityReport {
  EntropyKind functional;
  std::vector<MonotonicitySample> samples;
  double max_violation;     // largest finite-difference derivative (<= 0 when monotone)
  double constraint_drift;  // max relative deviation from the initial constraint
  Weighting matched;        // which theorem weighting the finite differences satisfy
  double match_rel_error;   // misfit of the matched weighting
  TerminalEvent terminal;
};

/// Integrate a coupled flow with phi0 solved from the constraint and compare
/// the functional's finite-difference derivative against both candidate
/// theorem right-hand sides.
MonotonicityReport run_with_report(FlowKind kind, const NormalizedContactData& nd,
                                   FlowState s0, double t_end, const EntropyConfig& cfg,
                                   int samples = 401);

EntropyKind entropy_kind_for_flow(FlowKind kind);

} // namespace tflow

#endif
