#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "qcurv/bounds.hpp"

namespace qcurv {

/// Second fundamental forms of the shape diag(lambda_a, mu_a, ..., mu_a), one
/// pair per normal direction.
struct EqualitySpec {
  enum class Kind { QuasiUmbilical, ChenEquality, Umbilical };

  int n = 2;
  std::vector<std::pair<double, double>> pairs;  // (lambda_alpha, mu_alpha)
  Kind kind = Kind::QuasiUmbilical;

  /// lambda = t/2, mu = t/(2(n-1)) for each trace t.
  static EqualitySpec chen_equality(int n, const std::vector<double>& traces);
  static EqualitySpec umbilical(int n, const std::vector<double>& values);
  static EqualitySpec quasi_umbilical(int n, std::vector<std::pair<double, double>> pairs);

  /// Throws Errc::invalid_input when the pairs do not match `kind`.
  void validate(double tol = 1e-12) const;
};

std::string_view to_string(EqualitySpec::Kind k) noexcept;
std::optional<EqualitySpec::Kind> parse_equality_kind(std::string_view s) noexcept;

Matrix build_matrix(const EqualitySpec& spec, int alpha);

/// Every h^alpha described by `spec`, in tangent-frame coordinates.
std::vector<Matrix> build_sff(const EqualitySpec& spec);

/// Recovers (lambda, mu) of diag(lambda, mu, ..., mu) from its trace t and its
/// squared Frobenius norm s. sign = +1 returns the pair with lambda >= mu.
std::pair<double, double> hineva_eigenvalues(double t, double s, int n, int sign = +1);

/// Orthonormal basis (tangent-frame coordinates, as columns) of the common kernel
/// N_p = {X : h(X, Y) = 0 for all Y}.
Matrix null_space(const SubmanifoldPoint& p, double tol = 1e-9);

struct EigenPair {
  bool active = false;     // h^alpha != 0
  bool umbilical = false;  // h^alpha is a multiple of the identity
  double lambda = 0.0;
  double mu = 0.0;
};

struct EqualityDiagnosis {
  bool is_quasi_umbilical = false;
  std::vector<EigenPair> eigen_pairs;
  std::vector<std::optional<double>> ratios;  // |lambda - mu| / (lambda + (n-1) mu)
  bool ratio_invariant = false;
  Matrix null_space_basis;
  std::optional<Vector> lambda_direction;  // shared lambda-eigenvector, tangent coords
  std::vector<BoundReport> bound_reports;  // Ricci bounds evaluated at lambda_direction
};

/// |2 h(X,X) - n H| for a unit tangent X (tangent-frame coordinates). Zero
/// exactly when Ric(X) attains the mean-curvature upper bound.
double upper_equality_residual(const SubmanifoldPoint& p, const Vector& x_coords);

EqualityDiagnosis diagnose(const SubmanifoldPoint& p, double tol = 1e-9,
                           double rel_tol = 1e-9);

}  // namespace qcurv
