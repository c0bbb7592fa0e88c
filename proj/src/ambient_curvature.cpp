#include "qcurv/ambient_curvature.hpp"

#include <cmath>
#include <string>

namespace qcurv {

namespace {

constexpr double kSpanTol = 1e-10;

void require_dim(const Vector& v, int dim, const char* name) {
  if (v.size() != dim) {
    throw Error(Errc::invalid_input, std::string(name) + ": expected dimension " +
                                         std::to_string(dim) + ", got " +
                                         std::to_string(v.size()));
  }
}

}  // namespace

std::string_view to_string(Convention c) noexcept {
  switch (c) {
    case Convention::Eq21: return "eq21";
    case Convention::QP4c: return "qp4c";
    case Convention::Tilde: return "tilde";
  }
  return "eq21";
}

std::optional<Convention> parse_convention(std::string_view s) noexcept {
  if (s == "eq21") return Convention::Eq21;
  if (s == "qp4c") return Convention::QP4c;
  if (s == "tilde") return Convention::Tilde;
  return std::nullopt;
}

AmbientSpaceForm::AmbientSpaceForm(QuaternionStructure structure, double c,
                                   Convention convention)
    : structure_(std::move(structure)), c_(c), convention_(convention) {
  if (!std::isfinite(c)) {
    throw Error(Errc::invalid_input, "curvature constant must be finite");
  }
  coefficient_ = convention == Convention::Eq21 ? c : c / 4.0;
}

double curvature_4(const AmbientSpaceForm& a, const Vector& x, const Vector& y,
                   const Vector& z, const Vector& w) {
  const int d = a.dim();
  require_dim(x, d, "X");
  require_dim(y, d, "Y");
  require_dim(z, d, "Z");
  require_dim(w, d, "W");

  double s = y.dot(z) * x.dot(w) - x.dot(z) * y.dot(w);
  for (const auto& phi : a.structure().ops()) {
    const Vector px = phi * x;
    const Vector py = phi * y;
    const Vector pz = phi * z;
    s += py.dot(z) * px.dot(w) - px.dot(z) * py.dot(w) + 2.0 * x.dot(py) * pz.dot(w);
  }
  return a.coefficient() * s;
}

double ambient_sectional(const AmbientSpaceForm& a, const Vector& x, const Vector& y) {
  require_dim(x, a.dim(), "X");
  require_dim(y, a.dim(), "Y");
  if (std::abs(x.norm() - 1.0) > kSpanTol || std::abs(y.norm() - 1.0) > kSpanTol ||
      std::abs(x.dot(y)) > kSpanTol) {
    throw Error(Errc::invalid_input, "ambient_sectional: X, Y must be orthonormal");
  }
  return curvature_4(a, x, y, y, x);
}

Matrix orthonormal_completion(const Vector& coords) {
  const auto n = coords.size();
  // Householder reflector mapping e1 to coords; its remaining columns complete it.
  Eigen::HouseholderQR<Matrix> qr{Matrix(coords)};
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

double ambient_ricci_tangent(const AmbientSpaceForm& a, const Matrix& frame,
                             const Vector& x) {
  require_dim(x, a.dim(), "X");
  if (frame.rows() != a.dim()) {
    throw Error(Errc::invalid_input, "frame rows must equal the ambient dimension");
  }
  if (std::abs(x.norm() - 1.0) > kSpanTol) {
    throw Error(Errc::invalid_input, "X is not a unit vector");
  }
  const Vector coords = frame.transpose() * x;
  if ((frame * coords - x).norm() > kSpanTol) {
    throw Error(Errc::invalid_input, "X does not lie in the span of the frame");
  }
  const Matrix completion = frame * orthonormal_completion(coords.normalized());
  double ric = 0.0;
  for (Eigen::Index j = 0; j < completion.cols(); ++j) {
    const Vector f = completion.col(j);
    ric += curvature_4(a, x, f, f, x);
  }
  return ric;
}

}  // namespace qcurv
