#pragma once

#include <cmath>
#include <random>

#include "qcurv/search.hpp"

namespace qcurv::test_support {

inline Vector random_unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

inline Matrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  }
  return scale * (a + a.transpose()) / std::sqrt(2.0);
}

// Random orthonormal pair (X, Y) in R^dim.
inline std::pair<Vector, Vector> random_pair(std::mt19937_64& rng, int dim) {
  Vector x = random_unit(rng, dim);
  Vector y = random_unit(rng, dim);
  y -= y.dot(x) * x;
  return {x, y.normalized()};
}

// Tangent frame from coordinate axes of R^{4m}; e.g. {0, 4} gives (e1, e5).
inline Matrix axes(int m, std::initializer_list<int> idx) {
  Matrix t = Matrix::Zero(4 * m, static_cast<Eigen::Index>(idx.size()));
  int col = 0;
  for (int i : idx) t(i, col++) = 1.0;
  return t;
}

// Totally real point spanned by e_1, e_5, e_9, ... in R^{4m}.
inline SubmanifoldPoint totally_real_axes(int n, int m, double c, std::vector<Matrix> h,
                                          Convention conv = Convention::Eq21) {
  Matrix t = Matrix::Zero(4 * m, n);
  for (int i = 0; i < n; ++i) t(4 * i, i) = 1.0;
  return SubmanifoldPoint(AmbientSpaceForm(QuaternionStructure::standard(m), c, conv), t,
                          orthonormal_complement(t), std::move(h), tag::TotallyReal{});
}

inline SubmanifoldPoint random_generic(std::mt19937_64& rng, int n, int m, double c, double scale = 1.0,
                                       Convention conv = Convention::Eq21) {
  const QuaternionStructure q = QuaternionStructure::standard(m);
  FrameSample fs = sample_frame(ClassTemplate{}, n, 0, q, rng);
  std::vector<Matrix> h;
  for (int a = 0; a < 4 * m - n; ++a) h.push_back(random_symmetric(rng, n, scale));
  return SubmanifoldPoint(AmbientSpaceForm(q, c, conv), fs.tangent, fs.normal, std::move(h));
}

// K(e_i, e_j) from the Gauss equation written out entrywise.
inline double gauss_sectional_oracle(const SubmanifoldPoint& p, int i, int j) {
  double k = ambient_sectional(p.ambient(), p.tangent().col(i), p.tangent().col(j));
  for (const Matrix& h : p.sff()) k += h(i, i) * h(j, j) - h(i, j) * h(i, j);
  return k;
}

}  // namespace qcurv::test_support
