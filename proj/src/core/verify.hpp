#ifndef TFLOW_VERIFY_HPP
#define TFLOW_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tflow::verify {

struct Result {
  std::string name;
  bool pass;
  std::string detail;
};

struct Options {
  uint64_t seed = 20260810;
  int cases = 0;         // overrides the per-suite default when positive
  bool inject_fault = false; // testing hook: corrupts one comparison
};

// Cross-check suites. Each one is self-contained and deterministic for a
// given seed.
Result oracle_equivalence(const Options& o);
Result b_scaling(const Options& o);
Result reality_and_webster_identity(const Options& o);
Result lie_derivative_identity(const Options& o);
Result torsion_zero_set(const Options& o);
Result normalized_ode_anchor(const Options& o);
Result closed_form_pdq(const Options& o);
Result closed_form_prequant(const Options& o);
Result rk4_order(const Options& o);
Result rossi_convergence(const Options& o);
Result heisenberg_soliton(const Options& o);
Result gradient_flow(const Options& o);
Result entropy_monotonicity(const Options& o);
Result rescaling_invariance(const Options& o);
Result variation_identities(const Options& o);
Result classification_table(const Options& o);
Result convergence_theorem(const Options& o);
Result repelling_case(const Options& o);
Result blowup_bracketing(const Options& o);
Result frame_normalization(const Options& o);
Result reeb_defining_equations(const Options& o);

using Callback = std::function<void(const Result&)>;

/// Runs every suite; returns the number of failures.
int run_all(const Options& o, const Callback& cb);

} // namespace tflow::verify

#endif
