#pragma once

#include <optional>
#include <string_view>

#include "qcurv/quat_algebra.hpp"

namespace qcurv {

/// Which normalization of the curvature constant the user supplied.
///
///  - Eq21:  c is the coefficient of the quaternionic space-form tensor itself
///           (the ambient is QP^m(4c); quaternionic planes have curvature 4c).
///  - QP4c:  the supplied value is the quaternionic sectional curvature 4c.
///  - Tilde: the ambient is "M~(c)"; the tensor coefficient is c/4.
enum class Convention { Eq21, QP4c, Tilde };

std::string_view to_string(Convention c) noexcept;
std::optional<Convention> parse_convention(std::string_view s) noexcept;

/// Quaternionic space form: a quaternionic structure plus the curvature constant.
class AmbientSpaceForm {
 public:
  AmbientSpaceForm(QuaternionStructure structure, double c,
                   Convention convention = Convention::Eq21);

  const QuaternionStructure& structure() const noexcept { return structure_; }
  int dim() const noexcept { return structure_.dim(); }
  int m() const noexcept { return structure_.m(); }

  /// The value as supplied by the user, in its own convention.
  double c() const noexcept { return c_; }
  Convention convention() const noexcept { return convention_; }

  /// Coefficient multiplying the curvature tensor bracket.
  double coefficient() const noexcept { return coefficient_; }

  /// Same constant in the "M~(c)" normalization (4 x coefficient).
  double tilde_c() const noexcept { return 4.0 * coefficient_; }

 private:
  QuaternionStructure structure_;
  double c_;
  Convention convention_;
  double coefficient_;
};

/// g(R(X,Y)Z, W) for the quaternionic space-form curvature tensor.
double curvature_4(const AmbientSpaceForm& a, const Vector& x, const Vector& y,
                   const Vector& z, const Vector& w);

/// K(X,Y) = R(X,Y,Y,X) for an orthonormal pair.
double ambient_sectional(const AmbientSpaceForm& a, const Vector& x, const Vector& y);

/// Ricci curvature of the ambient tensor traced over span(frame):
/// X is completed to an orthonormal basis of the span and R(X,f,f,X) is summed
/// over the completing vectors. Frame columns must be orthonormal.
double ambient_ricci_tangent(const AmbientSpaceForm& a, const Matrix& frame,
                             const Vector& x);

/// Orthonormal completion of the unit vector `coords` in R^n; returns an n x (n-1)
/// matrix whose columns together with `coords` form an orthonormal basis.
Matrix orthonormal_completion(const Vector& coords);

}  // namespace qcurv
