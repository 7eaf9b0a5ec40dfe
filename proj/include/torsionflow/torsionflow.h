/* torsionflow — pseudohermitian invariants and torsion-flow integration on
 * homogeneous contact 3-manifolds.
 *
 * C API for the shared library. All objects are opaque handles owned by the
 * library; every function that can fail returns a tf_status, and a
 * human-readable detail for the most recent failure on the calling thread is
 * available via tf_last_error().
 */
#ifndef TORSIONFLOW_H
#define TORSIONFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tf_status {
  TF_OK = 0,
  TF_ERR_INVALID_ARGUMENT = 1, /* bad parameter (c<=0, K=0 for prequant, ...) */
  TF_ERR_ANTISYMMETRY = 2,     /* raw constants violate c^i_jk = -c^i_kj */
  TF_ERR_JACOBI = 3,           /* raw constants violate the Jacobi identity */
  TF_ERR_NOT_CONTACT = 4,      /* theta ^ d(theta) vanishes */
  TF_ERR_NORMALIZATION = 5,    /* frame normalization post-check failed */
  TF_ERR_MISSING_FIELD = 6,    /* flow kind needs phi and/or tau */
  TF_ERR_DOMAIN = 7,           /* c, B or tau not strictly positive */
  TF_ERR_CONSTRAINT = 8,       /* entropy constraint violated at t = 0 */
  TF_ERR_UNKNOWN_PRESET = 9,
  TF_ERR_INTERNAL = 10         /* integrator or other internal failure */
} tf_status;

/* Geometry of the underlying unimodular Lie group (sign table). */
typedef enum tf_geometry {
  TF_GEOMETRY_SU2 = 0,
  TF_GEOMETRY_SL2R_HYPERBOLIC = 1,
  TF_GEOMETRY_SL2R_MIXED = 2,
  TF_GEOMETRY_E2 = 3,
  TF_GEOMETRY_E11 = 4,
  TF_GEOMETRY_HEISENBERG = 5,
  TF_GEOMETRY_NOT_UNIMODULAR = 6
} tf_geometry;

typedef enum tf_fixed_points_kind {
  TF_FIXED_POINTS_NONE = 0,
  TF_FIXED_POINTS_ISOLATED = 1,
  TF_FIXED_POINTS_ALL = 2
} tf_fixed_points_kind;

typedef enum tf_dynamics {
  TF_DYNAMICS_ATTRACTING = 0,
  TF_DYNAMICS_REPELLING = 1,
  TF_DYNAMICS_UNCLASSIFIED = 2
} tf_dynamics;

typedef enum tf_flow_kind {
  TF_FLOW_UNNORMALIZED = 0,
  TF_FLOW_NORMALIZED = 1,
  TF_FLOW_COUPLED_F = 2,
  TF_FLOW_COUPLED_W_PLUS = 3,
  TF_FLOW_COUPLED_W_MINUS = 4
} tf_flow_kind;

typedef enum tf_event_kind {
  TF_EVENT_COMPLETED = 0,
  TF_EVENT_CONVERGED = 1,
  TF_EVENT_BLOW_UP = 2,
  TF_EVENT_DOMAIN_EXIT = 3
} tf_event_kind;

typedef enum tf_weighting {
  TF_WEIGHTING_UNWEIGHTED = 0, /* measure total without e^{-phi} */
  TF_WEIGHTING_WEIGHTED = 1,   /* measure total with e^{-phi} */
  TF_WEIGHTING_NEITHER = 2
} tf_weighting;

typedef enum tf_entropy_kind {
  TF_ENTROPY_EINSTEIN_HILBERT = 0,
  TF_ENTROPY_F = 1,
  TF_ENTROPY_W_PLUS = 2,
  TF_ENTROPY_W_MINUS = 3
} tf_entropy_kind;

/* Flow state (a, c, B = b^2, optional phi, optional tau). */
typedef struct tf_state {
  double a;
  double c;
  double B;
  double phi;
  double tau;
  int has_phi;
  int has_tau;
} tf_state;

/* Pseudohermitian invariants of (a, b, c) on a normalized contact datum. */
typedef struct tf_invariants {
  double c_theta;
  double c_z_re, c_z_im;
  double torsion_re, torsion_im; /* A^1_{1bar} */
  double webster;
} tf_invariants;

typedef struct tf_integrate_opts {
  double rtol;              /* adaptive relative tolerance (default 1e-10) */
  double atol;              /* adaptive absolute tolerance (default 1e-12) */
  double dt;                /* > 0 selects fixed-step RK4 with this step */
  double blowup_threshold;  /* default 1e9 */
  double convergence_radius;/* default 1e-8 (normalized flow only) */
  int samples;              /* dense output count, default 200 */
} tf_integrate_opts;

typedef struct tf_sample {
  double t;
  tf_state state;
  double torsion_re, torsion_im;
  double webster;
  double einstein_hilbert;
} tf_sample;

typedef struct tf_event {
  tf_event_kind kind;
  double time;          /* event time (blow-up: bracketed estimate) */
  char field[8];        /* diverging/exiting field name, empty otherwise */
  double point_a, point_c; /* converged fixed point when kind==CONVERGED */
} tf_event;

typedef struct tf_entropy_sample {
  double t;
  double value;          /* functional value */
  double derivative;     /* central finite difference (NaN at the ends) */
  double rhs_unweighted; /* theorem right-hand side, measure without e^{-phi} */
  double rhs_weighted;   /* theorem right-hand side, measure with e^{-phi} */
  double constraint;
} tf_entropy_sample;

typedef struct tf_contact tf_contact;       /* normalized contact datum */
typedef struct tf_trajectory tf_trajectory; /* integration result */
typedef struct tf_entropy_report tf_entropy_report;

/* ---- library ---- */

const char* tf_version(void);

/* Detail message for the most recent error on this thread. */
const char* tf_last_error(void);

/* ---- contact data ---- */

/* Build from a named preset: pdq, prequant, heisenberg, rossi, su2,
 * sl2_hyperbolic. `param` is K for pdq/prequant and t for rossi; it is
 * ignored by the parameterless presets. `state0` (optional) receives the
 * preset's default initial state. */
tf_status tf_contact_preset(const char* name, double param, tf_contact** out,
                            tf_state* state0);

/* Build directly from the free coefficients of a normalized basis
 * (c^1_23 = 1 implied). Rejects tuples violating the Jacobi identity. */
tf_status tf_contact_normalized(double c2_13, double c2_23, double c3_12,
                                double c3_23, tf_contact** out);

/* Build from a raw 3x3x3 coefficient array c[i][j][k] (row-major, 27 doubles)
 * and a contact form theta = sum theta[i] w^i; validates antisymmetry and the
 * Jacobi identity, then normalizes the frame. */
tf_status tf_contact_raw(const double c[27], const double theta[3],
                         tf_contact** out);

void tf_contact_free(tf_contact* nd);

/* Free coefficients out[4] = {c2_13, c2_23, c3_12, c3_23}. */
tf_status tf_contact_coefficients(const tf_contact* nd, double out[4]);

tf_status tf_contact_classify(const tf_contact* nd, tf_geometry* geometry,
                              int* admits_torsion_free, int* unimodular);

/* Torsion-free complex structures: kind plus the isolated point if any. */
tf_status tf_contact_fixed_points(const tf_contact* nd,
                                  tf_fixed_points_kind* kind, double* a,
                                  double* c);

tf_status tf_contact_dynamics(const tf_contact* nd, tf_dynamics* out);

/* ---- pseudohermitian invariants ---- */

/* Closed-form invariants (use_oracle = 0) or the structure-equation route
 * (use_oracle = 1). */
tf_status tf_invariants_compute(const tf_contact* nd, double a, double b,
                                double c, int use_oracle, tf_invariants* out);

/* ---- flow ---- */

/* Time derivative of `s` under the given flow kind (phi/tau slots of `out`
 * receive d(phi)/dt, d(tau)/dt when present). */
tf_status tf_flow_rhs(const tf_contact* nd, tf_flow_kind kind,
                      const tf_state* s, tf_state* out);

/* Normalized-flow phase field on an na x nc grid; writes 4*na*nc doubles
 * (a, c, da, dc) row-major into `buffer`. */
tf_status tf_phase_field(const tf_contact* nd, double a_lo, double a_hi,
                         double c_lo, double c_hi, int na, int nc,
                         double* buffer);

/* ---- integration ---- */

void tf_integrate_opts_default(tf_integrate_opts* opts);

tf_status tf_integrate(const tf_contact* nd, tf_flow_kind kind,
                       const tf_state* s0, double t_end,
                       const tf_integrate_opts* opts, tf_trajectory** out);

void tf_trajectory_free(tf_trajectory* traj);
size_t tf_trajectory_size(const tf_trajectory* traj);
tf_status tf_trajectory_sample(const tf_trajectory* traj, size_t i,
                               tf_sample* out);
tf_status tf_trajectory_event(const tf_trajectory* traj, tf_event* out);

/* ---- entropy ---- */

/* Functional value at a single state; W is the Webster curvature there. */
tf_status tf_entropy_value(tf_entropy_kind kind, const tf_state* s, double W,
                           double vol0, double* out);

tf_status tf_entropy_constraint(tf_entropy_kind kind, const tf_state* s,
                                double vol0, double* out);

/* Integrate a coupled flow (TF_FLOW_COUPLED_*) with phi0 solved from the
 * functional's constraint, and report monotonicity diagnostics. */
tf_status tf_entropy_run(const tf_contact* nd, tf_flow_kind kind,
                         const tf_state* s0, double t_end, double vol0,
                         int samples, tf_entropy_report** out);

void tf_entropy_report_free(tf_entropy_report* rep);
size_t tf_entropy_report_size(const tf_entropy_report* rep);
tf_status tf_entropy_report_sample(const tf_entropy_report* rep, size_t i,
                                   tf_entropy_sample* out);
tf_status tf_entropy_report_summary(const tf_entropy_report* rep,
                                    double* max_violation,
                                    double* constraint_drift,
                                    tf_weighting* matched,
                                    tf_event* terminal);

/* ---- self-verification ---- */

/* Called once per suite with its name, pass flag and a detail line. */
typedef void (*tf_verify_callback)(const char* suite, int pass,
                                   const char* detail, void* user);

/* Runs every cross-check suite. `cases` scales the randomized suites
 * (0 selects the default). `inject_fault` is a testing hook that corrupts
 * one comparison so the failure path can be exercised. Returns the number
 * of failed suites through `failures`. */
tf_status tf_verify_run(uint64_t seed, int cases, int inject_fault,
                        tf_verify_callback cb, void* user, int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TORSIONFLOW_H */
