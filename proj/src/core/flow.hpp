#ifndef TFLOW_FLOW_HPP
#define TFLOW_FLOW_HPP

#include <optional>
#include <vector>

#include "invariants.hpp"
#include "structure.hpp"

namespace tflow {

enum class FlowKind {
  Unnormalized,
  Normalized,
  CoupledF,
  CoupledWPlus,
  CoupledWMinus,
};

const char* flow_kind_name(FlowKind k);

/// State of any flow variant. B = b^2. c and B stay strictly positive while
/// the flow is defined; leaving the domain is a terminal event.
struct FlowState {
  double a = 0.0;
  double c = 1.0;
  double B = 1.0;
  std::optional<double> phi;
  std::optional<double> tau;

  void require_domain() const;
  void require_fields(FlowKind kind) const;
};

/// Time derivative of every present field.
struct FlowDerivative {
  double da = 0.0;
  double dc = 0.0;
  double dB = 0.0;
  double dphi = 0.0;
  double dtau = 0.0;
};

/// Right-hand side of the selected flow variant at homogeneous scope
/// (spatially constant a, c, B, phi).
FlowDerivative rhs(FlowKind kind, const NormalizedContactData& nd, const FlowState& s);

/// da, dc of the J-part for a given deformation component E_11 (lower indices,
/// E_11 = conj(E^1_{1bar})) at scale b.
void j_part(double a, double c, Complex e11, double& da, double& dc);

struct FixedPointSet {
  enum class Kind { None, Isolated, All } kind;
  std::vector<std::pair<double, double>> points; // (a, c), nonempty iff Isolated
};

/// Torsion-free complex structures of the normalized flow: the isolated point
/// (0, sqrt(-c^3_12 / c^2_13)) when the ratio is positive, every (a, c) when
/// both coefficients vanish, none otherwise. Meaningful on unimodular data.
FixedPointSet fixed_points(const NormalizedContactData& nd);

enum class DynamicsClass { Attracting, Repelling, Unclassified };

const char* dynamics_name(DynamicsClass d);

/// Sign classification of the normalized flow: attracting iff c^3_12 > 0 and
/// c^2_13 < 0, repelling iff c^3_12 < 0 and c^2_13 > 0.
DynamicsClass classify_dynamics(const NormalizedContactData& nd);

struct PhaseNode {
  double a, c, da, dc;
};

/// Normalized-flow field sampled on an na x nc grid (row-major over a).
std::vector<PhaseNode> phase_field(const NormalizedContactData& nd, double a_lo,
                                   double a_hi, double c_lo, double c_hi, int na,
                                   int nc);

/// Weight of |A_11|^2 in the torsion-norm expressions, calibrated once against
/// the closed-form pdq K = 0 trajectory and frozen.
int torsion_norm_weight();

struct VariationReport {
  double webster_residual;  // max |d/dt W - 2(W^2 - kappa |A_11|^2)|
  double torsion_residual;  // max |d/dt A_11 - (2 W A_11 - i A_{11,0})|
  int kappa;                // calibrated |A|^2 weight
  // A_{11,0} is evaluated as 2 i c_theta A_11 (conjugate of the covariant
  // T-derivative of A_{1bar 1bar}); at unimodular scope the right-hand side
  // of the torsion equation is identically zero since W = -c_theta.
};

/// Central finite differences of W(t) and A_11(t) along an unnormalized
/// trajectory from s0, compared against the reduced evolution identities.
/// h must lie in [1e-6, 1e-3].
VariationReport variation_identity_check(const NormalizedContactData& nd,
                                         const FlowState& s0, double h);

} // namespace tflow

#endif
