#ifndef TFLOW_STRUCTURE_HPP
#define TFLOW_STRUCTURE_HPP

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace tflow {

/// Structure constants of a global coframe, d w^i = sum_{j<k} c^i_{jk} w^j ^ w^k.
/// Only the upper triangle (j < k) is stored; antisymmetry is structural.
/// The dual frame brackets are [X_j, X_k] = -sum_i c^i_{jk} X_i.
class StructureConstants {
public:
  /// Index of the ordered pair (j,k), j<k, in storage order (1,2),(1,3),(2,3).
  static int pair_index(int j, int k);

  StructureConstants(); // all zero

  /// Validate a raw 3x3x3 array c[i][j][k] (0-based, row-major).
  /// Enforces antisymmetry exactly and the Jacobi identity to `jacobi_tol`
  /// on unit-rescaled constants.
  static StructureConstants validate(const std::array<double, 27>& raw,
                                     double jacobi_tol = 1e-12);

  /// Build from the nine upper-triangle coefficients upper[i][pair].
  static StructureConstants from_upper(const double upper[3][3],
                                       double jacobi_tol = 1e-12);

  double coeff(int i, int j, int k) const; // 0-based indices, any j,k
  double upper(int i, int pair) const { return c_[i][pair]; }

  /// [X, Y] for coefficient vectors in the dual frame.
  Eigen::Vector3d bracket(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;

  /// Max-norm Jacobi residual of the dual bracket, brute-forced over all
  /// index triples.
  double jacobi_residual() const;

  /// Tr ad_X = 0 for all X, i.e. sum_j c^j_{ij} = 0 for every i.
  bool is_unimodular(double tol = 1e-12) const;

  /// d(theta)(X_j, X_k) for theta = sum_i theta_i w^i, as an antisymmetric matrix.
  Eigen::Matrix3d two_form(const Eigen::Vector3d& theta) const;

  /// Coefficient of w^1 ^ w^2 ^ w^3 in theta ^ d(theta).
  double contact_volume(const Eigen::Vector3d& theta) const;

private:
  double c_[3][3]; // [i][pair]
};

/// Coefficients of the Reeb field of theta in the dual frame:
/// theta(T) = 1, d(theta)(T, .) = 0. Throws NotContact.
Eigen::Vector3d reeb_vector(const StructureConstants& sc, const Eigen::Vector3d& theta);

/// Structure constants in a basis adapted to the contact form:
/// c^1_23 = 1 and c^1_12 = c^1_13 = c^2_12 = c^3_13 = 0 exactly.
/// Free coefficients: c^2_13, c^2_23, c^3_12, c^3_23.
class NormalizedContactData {
public:
  NormalizedContactData(double c2_13, double c2_23, double c3_12, double c3_23);

  double c2_13() const { return c2_13_; }
  double c2_23() const { return c2_23_; }
  double c3_12() const { return c3_12_; }
  double c3_23() const { return c3_23_; }

  /// c^2_31 = -c^2_13 (first column of the classification table).
  double c2_31() const { return -c2_13_; }

  bool is_unimodular(double tol = 1e-12) const;

  StructureConstants constants() const;

private:
  double c2_13_, c2_23_, c3_12_, c3_23_;
};

struct NormalizationResult {
  NormalizedContactData data;
  Eigen::Matrix3d change_of_basis; // columns: new frame vectors in the old frame
};

/// Adapt the frame to theta: computes the Reeb field, splits ker(theta) by the
/// eigenvectors of h = (1/2) L_T J for the reference J, rescales to c^1_23 = 1
/// and verifies the required coefficients vanish.
NormalizationResult normalize_frame(const StructureConstants& sc,
                                    const Eigen::Vector3d& theta);

enum class Geometry {
  SU2,
  SL2R_Hyperbolic,
  SL2R_Mixed,
  E2,
  E11,
  Heisenberg,
  NotUnimodular,
};

struct GeometryClass {
  Geometry geometry;
  bool admits_torsion_free;
};

const char* geometry_name(Geometry g);

/// Sign-table classification on the pair (c^2_31, c^3_12). Inputs whose free
/// 23-coefficients are nonzero report NotUnimodular.
GeometryClass classify_geometry(const NormalizedContactData& nd, double tol = 1e-12);

} // namespace tflow

#endif
