#pragma once

#include <array>

#include "qcurv/types.hpp"

namespace qcurv {

/// Three anti-commuting orthogonal complex structures I, J, K on R^{4m}.
///
/// Immutable after construction. The standard structure places, on each
/// consecutive 4-block with basis order (1, i, j, k), the matrices of left
/// multiplication by the quaternion units i, j, k.
class QuaternionStructure {
 public:
  /// Wraps user-supplied operators. Only shapes are validated here; use
  /// verify_relations() to certify the algebraic relations.
  QuaternionStructure(Matrix i, Matrix j, Matrix k);

  static QuaternionStructure standard(int m);

  int m() const noexcept { return static_cast<int>(ops_[0].rows()) / 4; }
  int dim() const noexcept { return static_cast<int>(ops_[0].rows()); }

  const Matrix& I() const noexcept { return ops_[0]; }
  const Matrix& J() const noexcept { return ops_[1]; }
  const Matrix& K() const noexcept { return ops_[2]; }

  /// l in {0, 1, 2} selects I, J, K.
  const Matrix& op(int l) const { return ops_.at(static_cast<std::size_t>(l)); }
  const std::array<Matrix, 3>& ops() const noexcept { return ops_; }

 private:
  std::array<Matrix, 3> ops_;
};

struct RelationCheck {
  double max_deviation = 0.0;
  bool pass = false;
};

/// Max-norm residual over the squares, the six products, orthogonality and
/// skewness of I, J, K.
RelationCheck verify_relations(const QuaternionStructure& q, double tol = 1e-12);

/// Orthonormal basis (as columns) of span{X, IX, JX, KX} for unit X.
Matrix quaternionic_span(const QuaternionStructure& q, const Vector& x);

/// True iff Q(X) and Q(Y) are orthogonal within tol, i.e. the plane spanned by
/// the orthonormal pair X, Y is totally real.
bool is_totally_real_pair(const QuaternionStructure& q, const Vector& x,
                          const Vector& y, double tol = 1e-12);

}  // namespace qcurv
