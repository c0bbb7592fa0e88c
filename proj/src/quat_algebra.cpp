#include "qcurv/quat_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcurv {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::invalid_input: return "invalid-input";
    case Errc::invalid_point: return "invalid-point";
    case Errc::wrong_distribution: return "wrong-distribution";
    case Errc::internal_consistency: return "internal-consistency";
    case Errc::invalid_moments: return "invalid-moments";
    case Errc::unknown_bound: return "unknown-bound";
    case Errc::parse_error: return "parse-error";
    case Errc::infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

constexpr double kUnitTol = 1e-10;

void require_unit(const Vector& x, int dim, const char* name) {
  if (x.size() != dim) {
    throw Error(Errc::invalid_input, std::string(name) + ": expected dimension " +
                                         std::to_string(dim) + ", got " +
                                         std::to_string(x.size()));
  }
  if (std::abs(x.norm() - 1.0) > kUnitTol) {
    throw Error(Errc::invalid_input, std::string(name) + " is not a unit vector");
  }
}

}  // namespace

QuaternionStructure::QuaternionStructure(Matrix i, Matrix j, Matrix k)
    : ops_{std::move(i), std::move(j), std::move(k)} {
  const auto d = ops_[0].rows();
  if (d < 4 || d % 4 != 0) {
    throw Error(Errc::invalid_dimension,
                "quaternionic structure dimension must be a positive multiple of 4");
  }
  for (const auto& a : ops_) {
    if (a.rows() != d || a.cols() != d) {
      throw Error(Errc::invalid_dimension, "I, J, K must be square of equal size");
    }
  }
}

QuaternionStructure QuaternionStructure::standard(int m) {
  if (m < 1) {
    throw Error(Errc::invalid_dimension, "quaternionic dimension m must be >= 1");
  }
  // Left multiplication by i, j, k in the basis (1, i, j, k); column c is the
  // image of basis vector c.
  Matrix li(4, 4), lj(4, 4), lk(4, 4);
  // clang-format off
  li << 0, -1,  0,  0,
        1,  0,  0,  0,
        0,  0,  0, -1,
        0,  0,  1,  0;
  lj << 0,  0, -1,  0,
        0,  0,  0,  1,
        1,  0,  0,  0,
        0, -1,  0,  0;
  lk << 0,  0,  0, -1,
        0,  0, -1,  0,
        0,  1,  0,  0,
        1,  0,  0,  0;
  // clang-format on
  const int d = 4 * m;
  Matrix i = Matrix::Zero(d, d), j = Matrix::Zero(d, d), k = Matrix::Zero(d, d);
  for (int b = 0; b < m; ++b) {
    i.block(4 * b, 4 * b, 4, 4) = li;
    j.block(4 * b, 4 * b, 4, 4) = lj;
    k.block(4 * b, 4 * b, 4, 4) = lk;
  }
  return QuaternionStructure(std::move(i), std::move(j), std::move(k));
}

RelationCheck verify_relations(const QuaternionStructure& q, double tol) {
  const Matrix& i = q.I();
  const Matrix& j = q.J();
  const Matrix& k = q.K();
  const Matrix id = Matrix::Identity(q.dim(), q.dim());

  double dev = 0.0;
  auto acc = [&dev](const Matrix& r) { dev = std::max(dev, max_abs(r)); };
  acc(i * i + id);
  acc(j * j + id);
  acc(k * k + id);
  acc(i * j - k);
  acc(j * i + k);
  acc(j * k - i);
  acc(k * j + i);
  acc(k * i - j);
  acc(i * k + j);
  for (const auto& a : q.ops()) {
    acc(a.transpose() * a - id);
    acc(a + a.transpose());
  }
  return {dev, dev <= tol};
}

Matrix quaternionic_span(const QuaternionStructure& q, const Vector& x) {
  require_unit(x, q.dim(), "X");
  Matrix raw(q.dim(), 4);
  raw.col(0) = x;
  raw.col(1) = q.I() * x;
  raw.col(2) = q.J() * x;
  raw.col(3) = q.K() * x;
  // Modified Gram-Schmidt; the columns are orthonormal up to rounding already.
  for (int c = 0; c < 4; ++c) {
    for (int p = 0; p < c; ++p) {
      raw.col(c) -= raw.col(p).dot(raw.col(c)) * raw.col(p);
    }
    raw.col(c).normalize();
  }
  return raw;
}

bool is_totally_real_pair(const QuaternionStructure& q, const Vector& x,
                          const Vector& y, double tol) {
  require_unit(x, q.dim(), "X");
  require_unit(y, q.dim(), "Y");
  if (std::abs(x.dot(y)) > kUnitTol) {
    throw Error(Errc::invalid_input, "X and Y are not orthogonal");
  }
  const Matrix qx = (Matrix(q.dim(), 4) << x, q.I() * x, q.J() * x, q.K() * x).finished();
  const Matrix qy = (Matrix(q.dim(), 4) << y, q.I() * y, q.J() * y, q.K() * y).finished();
  return max_abs(qx.transpose() * qy) <= tol;
}

}  // namespace qcurv
