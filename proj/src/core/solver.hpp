#ifndef TFLOW_SOLVER_HPP
#define TFLOW_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "flow.hpp"

namespace tflow {

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double fixed_dt = 0.0;          // > 0 selects fixed-step RK4
  double blowup_threshold = 1e9;
  double convergence_radius = 1e-8;
  double dt_min = 1e-12;
  int samples = 200;
};

struct TerminalEvent {
  enum class Kind { Completed, Converged, BlowUp, DomainExit } kind;
  double time = 0.0;          // event time; blow-up times bracket the last accepted step
  std::string field;          // diverging / exiting field
  double point_a = 0.0, point_c = 0.0; // limit point when Converged
};

struct TrajectorySample {
  double t;
  FlowState state;
  Complex torsion;          // A^1_{1bar}
  double webster;
  double einstein_hilbert;  // W B^2 (vol0 = 1)
};

struct Trajectory {
  FlowKind kind;
  std::vector<TrajectorySample> samples; // times strictly increasing from 0
  TerminalEvent event;
};

/// Integrate the selected flow from s0 over [0, t_end] with dense output.
/// Blow-up and domain exit are reported outcomes, not errors.
Trajectory integrate(FlowKind kind, const NormalizedContactData& nd,
                     const FlowState& s0, double t_end,
                     const IntegrateOptions& opts = {});

/// Closed-form unnormalized pdq solution on the a = 0 branch.
/// Generic branch for K c0^2 != 1, linear-B branch otherwise.
std::pair<double, double> pdq_closed_form(double K, double c0, double b0, double t);

/// Blow-up/exit time of the pdq B-component (B = 0), if any.
std::optional<double> pdq_domain_exit_time(double K, double c0, double b0);

/// Closed-form unnormalized prequantization solution on the a = 0 branch.
std::pair<double, double> prequant_closed_form(double K, double c0, double B0,
                                               double t);

/// Scalar Riccati solution of the normalized a = 0 flow, dc/dt = 1 - K c^2.
/// Throws BlowUp (Err::Domain) past the finite blow-up time for K < 0.
double normalized_a0_closed_form(double K, double c0, double t);

/// Blow-up time of the normalized a = 0 flow (finite only for K < 0).
std::optional<double> normalized_a0_blowup_time(double K, double c0);

struct Preset {
  std::string name;
  NormalizedContactData data;
  FlowState initial;
};

/// Named presets: pdq(K), prequant(K != 0), heisenberg, rossi(t in [0,1)),
/// su2, sl2_hyperbolic. `param` is K (pdq, prequant) or t (rossi).
Preset preset(const std::string& name, double param = 0.0);

const std::vector<std::string>& preset_names();

} // namespace tflow

#endif
