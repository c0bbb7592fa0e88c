#include "qcurv/submanifold.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace qcurv {

namespace {

constexpr double kGramTol = 1e-10;
constexpr double kGramRepairTol = 1e-6;
constexpr double kSymTol = 1e-12;
constexpr double kTangentTol = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Matrix combined(const Matrix& t, const Matrix& n) {
  Matrix f(t.rows(), t.cols() + n.cols());
  f << t, n;
  return f;
}

double gram_residual(const Matrix& f) {
  return max_abs(f.transpose() * f - Matrix::Identity(f.cols(), f.cols()));
}

// Closest matrix with orthonormal columns (symmetric orthogonalization). Keeps
// column order and orientation, which the h coordinates depend on.
Matrix lowdin(const Matrix& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.transpose() * f);
  const Vector inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return f * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

std::string class_name(const ClassTag& tag) {
  return std::visit(overloaded{
                        [](const tag::Generic&) { return std::string("generic"); },
                        [](const tag::TotallyReal&) { return std::string("totally-real"); },
                        [](const tag::CR&) { return std::string("cr"); },
                        [](const tag::Slant&) { return std::string("slant"); },
                    },
                    tag);
}

Matrix orthonormal_complement(const Matrix& frame) {
  const auto d = frame.rows();
  Eigen::HouseholderQR<Matrix> qr(frame);
  const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - frame.cols());
}

SubmanifoldPoint::SubmanifoldPoint(AmbientSpaceForm ambient, Matrix tangent, Matrix normal,
                                   std::vector<Matrix> sff, ClassTag tag)
    : ambient_(std::move(ambient)),
      tangent_(std::move(tangent)),
      normal_(std::move(normal)),
      sff_(std::move(sff)),
      tag_(std::move(tag)) {
  const int d = ambient_.dim();
  const int n = static_cast<int>(tangent_.cols());
  if (tangent_.rows() != d || normal_.rows() != d) {
    throw Error(Errc::invalid_point, "frames must have " + std::to_string(d) + " rows");
  }
  if (n < 2 || n >= d) {
    throw Error(Errc::invalid_point, "tangent dimension n must satisfy 2 <= n < 4m");
  }
  if (normal_.cols() != d - n) {
    throw Error(Errc::invalid_point, "normal frame must have 4m - n columns");
  }
  const double gram = gram_residual(combined(tangent_, normal_));
  if (!(gram <= kGramTol)) {
    throw Error(Errc::invalid_point,
                "frame orthonormality violated (Gram residual " + std::to_string(gram) + ")");
  }
  if (static_cast<int>(sff_.size()) > d - n) {
    throw Error(Errc::invalid_point, "more second fundamental form matrices than normal directions");
  }
  for (std::size_t a = 0; a < sff_.size(); ++a) {
    const Matrix& h = sff_[a];
    if (h.rows() != n || h.cols() != n) {
      throw Error(Errc::invalid_point, "h[" + std::to_string(a) + "] must be n x n");
    }
    if (!h.allFinite()) {
      throw Error(Errc::invalid_point, "h[" + std::to_string(a) + "] has non-finite entries");
    }
    if (max_abs(h - h.transpose()) > kSymTol) {
      throw Error(Errc::invalid_point, "h[" + std::to_string(a) + "] is not symmetric");
    }
  }
  sff_.resize(static_cast<std::size_t>(d - n), Matrix::Zero(n, n));

  if (const auto* cr = std::get_if<tag::CR>(&tag_)) {
    std::set<int> seen;
    for (int i : cr->invariant) {
      if (i < 0 || i >= n || !seen.insert(i).second) {
        throw Error(Errc::invalid_point, "CR invariant indices must be distinct and in range");
      }
    }
  }
  if (const auto* s = std::get_if<tag::Slant>(&tag_)) {
    if (!(s->theta > 0.0 && s->theta <= M_PI / 2 + 1e-15)) {
      throw Error(Errc::invalid_point, "slant angle must lie in (0, pi/2]");
    }
  }
}

SubmanifoldPoint SubmanifoldPoint::from_data(AmbientSpaceForm ambient, Matrix tangent,
                                             Matrix normal, std::vector<Matrix> sff,
                                             ClassTag tag) {
  const auto d = ambient.dim();
  if (tangent.rows() != d) {
    throw Error(Errc::invalid_point, "tangent frame vectors must have length " + std::to_string(d));
  }
  if (tangent.cols() < 2 || tangent.cols() >= d) {
    throw Error(Errc::invalid_point, "tangent dimension n must satisfy 2 <= n < 4m");
  }
  const bool auto_normal = normal.size() == 0;
  Matrix frame = auto_normal ? tangent : combined(tangent, normal);
  if (!auto_normal && normal.rows() != d) {
    throw Error(Errc::invalid_point, "normal frame vectors must have length " + std::to_string(d));
  }
  const double gram = gram_residual(frame);
  if (!(gram <= kGramRepairTol)) {
    throw Error(Errc::invalid_point,
                "frame Gram residual " + std::to_string(gram) + " exceeds repair limit 1e-6");
  }
  if (gram > kGramTol) frame = lowdin(frame);
  const auto n = tangent.cols();
  tangent = frame.leftCols(n);
  normal = auto_normal ? orthonormal_complement(tangent) : Matrix(frame.rightCols(frame.cols() - n));
  return SubmanifoldPoint(std::move(ambient), std::move(tangent), std::move(normal),
                          std::move(sff), std::move(tag));
}

Vector SubmanifoldPoint::h(const Vector& u, const Vector& v) const {
  Vector out(codim());
  for (int a = 0; a < codim(); ++a) out[a] = u.dot(sff_[static_cast<std::size_t>(a)] * v);
  return out;
}

Vector SubmanifoldPoint::to_tangent_coords(const Vector& x, const char* name) const {
  if (x.size() != ambient_.dim()) {
    throw Error(Errc::invalid_input, std::string(name) + ": wrong ambient dimension");
  }
  Vector coords = tangent_.transpose() * x;
  if ((tangent_ * coords - x).norm() > kTangentTol * std::max(1.0, x.norm())) {
    throw Error(Errc::invalid_input, std::string(name) + " is not tangent");
  }
  return coords;
}

SubmanifoldPoint SubmanifoldPoint::with_sff(std::vector<Matrix> sff) const {
  return SubmanifoldPoint(ambient_, tangent_, normal_, std::move(sff), tag_);
}

SubmanifoldPoint SubmanifoldPoint::with_ambient(AmbientSpaceForm ambient) const {
  return SubmanifoldPoint(std::move(ambient), tangent_, normal_, sff_, tag_);
}

DerivedInvariants derive(const SubmanifoldPoint& p) {
  DerivedInvariants inv;
  const int n = p.n();
  inv.H = Vector::Zero(p.codim());
  const Matrix id = Matrix::Identity(n, n);
  for (int a = 0; a < p.codim(); ++a) {
    const Matrix& h = p.sff()[static_cast<std::size_t>(a)];
    const double ha = h.trace() / n;
    inv.H[a] = ha;
    inv.sffNorm2 += h.squaredNorm();
    inv.umbilicity_defect += (h - ha * id).squaredNorm();
  }
  inv.meanH2 = inv.H.squaredNorm();
  const auto& q = p.ambient().structure();
  for (int l = 0; l < 3; ++l) {
    const Matrix image = q.op(l) * p.tangent();
    // Row i, column j holds g(phi e_j, e_i); transpose to the (P_l)_ij = g(phi e_i, e_j) layout.
    inv.P[l] = (p.tangent().transpose() * image).transpose();
    inv.pNorm2[l] = inv.P[l].squaredNorm();
    inv.fNorm2[l] = (p.normal().transpose() * image).squaredNorm();
  }
  return inv;
}

double intrinsic_curvature_4(const SubmanifoldPoint& p, const Vector& x, const Vector& y,
                             const Vector& z, const Vector& w) {
  const Vector a = p.to_tangent_coords(x, "X");
  const Vector b = p.to_tangent_coords(y, "Y");
  const Vector c = p.to_tangent_coords(z, "Z");
  const Vector d = p.to_tangent_coords(w, "W");
  return curvature_4(p.ambient(), x, y, z, w) + p.h(a, d).dot(p.h(b, c)) -
         p.h(a, c).dot(p.h(b, d));
}

double ricci(const SubmanifoldPoint& p, const Vector& x) {
  const Vector a = p.to_tangent_coords(x, "X");
  if (std::abs(a.norm() - 1.0) > kTangentTol) {
    throw Error(Errc::invalid_input, "ricci: X must be a unit vector");
  }
  const Matrix comp = orthonormal_completion(a.normalized());
  const Vector hxx = p.h(a, a);
  double ric = 0.0;
  for (Eigen::Index j = 0; j < comp.cols(); ++j) {
    const Vector f = comp.col(j);
    const Vector fa = p.tangent() * f;
    const Vector hxf = p.h(a, f);
    ric += curvature_4(p.ambient(), x, fa, fa, x) + hxx.dot(p.h(f, f)) - hxf.squaredNorm();
  }
  return ric;
}

double sectional(const SubmanifoldPoint& p, const Vector& x, const Vector& y) {
  const Vector a = p.to_tangent_coords(x, "X");
  const Vector b = p.to_tangent_coords(y, "Y");
  if (std::abs(a.norm() - 1.0) > kTangentTol || std::abs(b.norm() - 1.0) > kTangentTol ||
      std::abs(a.dot(b)) > kTangentTol) {
    throw Error(Errc::invalid_input, "sectional: X, Y must be orthonormal");
  }
  const Vector hab = p.h(a, b);
  return curvature_4(p.ambient(), x, y, y, x) + p.h(a, a).dot(p.h(b, b)) - hab.squaredNorm();
}

ClassReport check_class(const SubmanifoldPoint& p, double tol, int slant_samples) {
  const auto& q = p.ambient().structure();
  const Matrix& e = p.tangent();
  const int n = p.n();
  ClassReport rep;

  auto tangential_max = [&](const std::vector<int>& idx) {
    double r = 0.0;
    for (int l = 0; l < 3; ++l) {
      for (int i : idx) r = std::max(r, (e.transpose() * (q.op(l) * e.col(i))).cwiseAbs().maxCoeff());
    }
    return r;
  };
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

  std::visit(
      overloaded{
          [&](const tag::Generic&) {
            rep.max_residual = 0.0;
            rep.detail = "generic: no constraint";
          },
          [&](const tag::TotallyReal&) {
            rep.max_residual = tangential_max(all);
            rep.detail = "max |g(phi e_i, e_j)|";
          },
          [&](const tag::CR& cr) {
            std::vector<int> perp;
            for (int i = 0; i < n; ++i) {
              if (std::find(cr.invariant.begin(), cr.invariant.end(), i) == cr.invariant.end()) {
                perp.push_back(i);
              }
            }
            double inv_res = 0.0;
            if (!cr.invariant.empty()) {
              Matrix d(e.rows(), static_cast<Eigen::Index>(cr.invariant.size()));
              for (std::size_t k = 0; k < cr.invariant.size(); ++k) {
                d.col(static_cast<Eigen::Index>(k)) = e.col(cr.invariant[k]);
              }
              for (int l = 0; l < 3; ++l) {
                const Matrix img = q.op(l) * d;
                inv_res = std::max(inv_res, max_abs(img - d * (d.transpose() * img)));
              }
            }
            const double perp_res = perp.empty() ? 0.0 : tangential_max(perp);
            rep.max_residual = std::max(inv_res, perp_res);
            std::ostringstream os;
            os << "D invariance residual " << inv_res << ", D-perp totally real residual " << perp_res;
            rep.detail = os.str();
          },
          [&](const tag::Slant& s) {
            const double target = std::cos(s.theta);
            std::mt19937_64 rng(0x51a47u);
            std::normal_distribution<double> g;
            double r = 0.0;
            auto probe = [&](const Vector& coords) {
              const Vector x = e * coords;
              for (int l = 0; l < 3; ++l) {
                const double norm = (e.transpose() * (q.op(l) * x)).norm();
                r = std::max(r, std::abs(norm - target));
              }
            };
            for (int i = 0; i < n; ++i) probe(Vector::Unit(n, i));
            for (int k = 0; k < slant_samples; ++k) {
              Vector v(n);
              for (int i = 0; i < n; ++i) v[i] = g(rng);
              probe(v.normalized());
            }
            rep.max_residual = r;
            rep.detail = "max | |P_l X| - cos(theta) |";
          },
      },
      p.class_tag());
  rep.pass = rep.max_residual <= tol;
  return rep;
}

}  // namespace qcurv
