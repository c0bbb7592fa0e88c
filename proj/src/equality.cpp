#include "qcurv/equality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcurv {

namespace {

constexpr double kActiveTol = 1e-12;
constexpr double kSpreadRel = 1e-8;
constexpr double kAngleTol = 1e-6;
constexpr double kMomentTol = 1e-12;

struct Candidate {
  double lambda;
  double mu;
  Vector v;
};

// Possible (lambda, mu, lambda-eigenvector) readings of h as diag(lambda, mu, ..., mu).
std::vector<Candidate> candidates(const Matrix& h) {
  const auto n = h.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Vector& w = es.eigenvalues();
  const double tol = kSpreadRel * h.norm();
  std::vector<Candidate> out;
  auto mean = [&w](Eigen::Index from, Eigen::Index count) {
    return w.segment(from, count).mean();
  };
  if (w[n - 1] - w[1] <= tol) {
    out.push_back({w[0], mean(1, n - 1), es.eigenvectors().col(0)});
  }
  if (w[n - 2] - w[0] <= tol) {
    out.push_back({w[n - 1], mean(0, n - 1), es.eigenvectors().col(n - 1)});
  }
  return out;
}

bool same_axis(const Vector& a, const Vector& b) {
  return std::min((a - b).norm(), (a + b).norm()) <= kAngleTol;
}

}  // namespace

EqualitySpec EqualitySpec::chen_equality(int n, const std::vector<double>& traces) {
  EqualitySpec s;
  s.n = n;
  s.kind = Kind::ChenEquality;
  for (double t : traces) s.pairs.emplace_back(t / 2, t / (2.0 * (n - 1)));
  return s;
}

EqualitySpec EqualitySpec::umbilical(int n, const std::vector<double>& values) {
  EqualitySpec s;
  s.n = n;
  s.kind = Kind::Umbilical;
  for (double v : values) s.pairs.emplace_back(v, v);
  return s;
}

EqualitySpec EqualitySpec::quasi_umbilical(int n, std::vector<std::pair<double, double>> pairs) {
  EqualitySpec s;
  s.n = n;
  s.kind = Kind::QuasiUmbilical;
  s.pairs = std::move(pairs);
  return s;
}

void EqualitySpec::validate(double tol) const {
  if (n < 2) throw Error(Errc::invalid_input, "equality spec: n must be >= 2");
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    const auto [l, m] = pairs[a];
    const double scale = std::max({1.0, std::abs(l), std::abs(m)});
    if (kind == Kind::Umbilical && std::abs(l - m) > tol * scale) {
      throw Error(Errc::invalid_input,
                  "equality spec pair " + std::to_string(a) + ": umbilical needs lambda == mu");
    }
    if (kind == Kind::ChenEquality) {
      const double t = l + (n - 1) * m;
      if (std::abs(l - t / 2) > tol * scale || std::abs(m - t / (2.0 * (n - 1))) > tol * scale) {
        throw Error(Errc::invalid_input, "equality spec pair " + std::to_string(a) +
                                             ": Chen equality needs lambda = t/2, mu = t/(2(n-1))");
      }
    }
  }
}

std::string_view to_string(EqualitySpec::Kind k) noexcept {
  switch (k) {
    case EqualitySpec::Kind::QuasiUmbilical: return "quasi-umbilical";
    case EqualitySpec::Kind::ChenEquality: return "chen";
    case EqualitySpec::Kind::Umbilical: return "umbilical";
  }
  return "quasi-umbilical";
}

std::optional<EqualitySpec::Kind> parse_equality_kind(std::string_view s) noexcept {
  if (s == "quasi-umbilical") return EqualitySpec::Kind::QuasiUmbilical;
  if (s == "chen") return EqualitySpec::Kind::ChenEquality;
  if (s == "umbilical") return EqualitySpec::Kind::Umbilical;
  return std::nullopt;
}

Matrix build_matrix(const EqualitySpec& spec, int alpha) {
  const auto [l, m] = spec.pairs.at(static_cast<std::size_t>(alpha));
  Vector d = Vector::Constant(spec.n, m);
  d[0] = l;
  return d.asDiagonal();
}

std::vector<Matrix> build_sff(const EqualitySpec& spec) {
  std::vector<Matrix> out;
  for (std::size_t a = 0; a < spec.pairs.size(); ++a) out.push_back(build_matrix(spec, static_cast<int>(a)));
  return out;
}

std::pair<double, double> hineva_eigenvalues(double t, double s, int n, int sign) {
  if (n < 2) throw Error(Errc::invalid_input, "hineva_eigenvalues: n must be >= 2");
  const double nn = n;
  const double disc = nn * s - t * t;
  if (disc < -kMomentTol) {
    throw Error(Errc::invalid_moments, "hineva_eigenvalues: n*s - t^2 < 0");
  }
  const double root = std::sqrt(std::max(disc, 0.0) / (nn - 1));
  const double sg = sign >= 0 ? 1.0 : -1.0;
  return {(t + sg * (nn - 1) * root) / nn, (t - sg * root) / nn};
}

Matrix null_space(const SubmanifoldPoint& p, double tol) {
  const int n = p.n();
  Matrix stacked(static_cast<Eigen::Index>(p.codim()) * n, n);
  for (int a = 0; a < p.codim(); ++a) stacked.middleRows(a * n, n) = p.sff()[static_cast<std::size_t>(a)];
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv[i] <= tol) keep.push_back(i);
  }
  Matrix basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = svd.matrixV().col(keep[k]);
  return basis;
}

double upper_equality_residual(const SubmanifoldPoint& p, const Vector& x_coords) {
  if (x_coords.size() != p.n()) throw Error(Errc::invalid_input, "X must have n tangent coordinates");
  Vector trace = Vector::Zero(p.codim());
  for (int a = 0; a < p.codim(); ++a) trace[a] = p.sff()[static_cast<std::size_t>(a)].trace();
  return (2.0 * p.h(x_coords, x_coords) - trace).norm();
}

EqualityDiagnosis diagnose(const SubmanifoldPoint& p, double tol, double rel_tol) {
  const int n = p.n();
  EqualityDiagnosis dg;
  dg.eigen_pairs.resize(static_cast<std::size_t>(p.codim()));
  dg.ratios.resize(static_cast<std::size_t>(p.codim()));

  std::vector<std::vector<Candidate>> cands(static_cast<std::size_t>(p.codim()));
  bool pattern = true;
  int first_shaped = -1;
  for (int a = 0; a < p.codim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const Matrix& h = p.sff()[ua];
    EigenPair& ep = dg.eigen_pairs[ua];
    ep.active = h.norm() > kActiveTol;
    if (!ep.active) continue;
    const double mean = h.trace() / n;
    if ((h - mean * Matrix::Identity(n, n)).norm() <= kSpreadRel * h.norm()) {
      ep.umbilical = true;
      ep.lambda = ep.mu = mean;
      continue;
    }
    cands[ua] = candidates(h);
    if (cands[ua].empty()) {
      pattern = false;
    } else if (first_shaped < 0) {
      first_shaped = a;
    }
  }

  if (pattern && first_shaped >= 0) {
    bool found = false;
    for (const Candidate& c0 : cands[static_cast<std::size_t>(first_shaped)]) {
      std::vector<const Candidate*> pick(static_cast<std::size_t>(p.codim()), nullptr);
      bool ok = true;
      for (int a = 0; a < p.codim() && ok; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (cands[ua].empty()) continue;
        auto it = std::find_if(cands[ua].begin(), cands[ua].end(),
                               [&](const Candidate& c) { return same_axis(c.v, c0.v); });
        if (it == cands[ua].end()) {
          ok = false;
        } else {
          pick[ua] = &*it;
        }
      }
      if (ok) {
        for (std::size_t ua = 0; ua < pick.size(); ++ua) {
          if (pick[ua] != nullptr) {
            dg.eigen_pairs[ua].lambda = pick[ua]->lambda;
            dg.eigen_pairs[ua].mu = pick[ua]->mu;
          }
        }
        dg.lambda_direction = c0.v;
        found = true;
        break;
      }
    }
    pattern = found;
  } else if (pattern) {
    // Every active h^alpha is umbilical (or h = 0): any direction serves.
    dg.lambda_direction = Vector::Unit(n, 0);
  }
  dg.is_quasi_umbilical = pattern;

  std::vector<double> present;
  for (int a = 0; a < p.codim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const EigenPair& ep = dg.eigen_pairs[ua];
    const double trace = p.sff()[ua].trace();
    if (!ep.active || std::abs(trace) <= kActiveTol) continue;
    if (!pattern) continue;
    const double r = std::abs(ep.lambda - ep.mu) / (ep.lambda + (n - 1) * ep.mu);
    dg.ratios[ua] = r;
    present.push_back(r);
  }
  if (present.empty()) {
    dg.ratio_invariant = pattern;
  } else {
    const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
    dg.ratio_invariant = pattern && (*hi - *lo) <= tol;
  }

  dg.null_space_basis = null_space(p, tol);

  if (dg.lambda_direction) {
    const DerivedInvariants inv = derive(p);
    for (const BoundInfo& bi : bound_catalog()) {
      if (bi.sectional) continue;
      try {
        dg.bound_reports.push_back(evaluate(p, inv, bi.id, *dg.lambda_direction, std::nullopt, rel_tol));
      } catch (const Error& e) {
        if (e.code() != Errc::wrong_distribution) throw;
      }
    }
  }
  return dg;
}

}  // namespace qcurv
