#include "qcurv/search.hpp"

#include "qcurv/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

namespace qcurv {

namespace {

constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kDirectionStream = 2;
constexpr std::uint64_t kFalsifyStream = 3;
constexpr std::uint64_t kEqualityStream = 4;

constexpr double kSlantCheckTol = 1e-8;
constexpr double kEqualityDiagnoseThreshold = 1e-8;

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index writes
// only its own output slot, so results do not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Vector gaussian(Rng& rng, Eigen::Index size) {
  std::normal_distribution<double> g;
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = g(rng);
  return v;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Projects v off the orthonormal columns of `basis` (twice, for stability).
void project_off(Vector& v, const Matrix& basis) {
  if (basis.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.transpose() * v);
}

Matrix append_cols(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

Matrix quaternionic_orbit(const QuaternionStructure& q, const Vector& u) {
  Matrix out(q.dim(), 4);
  out << u, q.I() * u, q.J() * u, q.K() * u;
  return out;
}

// Draws a unit vector orthogonal to `avoid`; nullopt when the complement is (numerically) empty.
std::optional<Vector> draw_orthogonal(const Matrix& avoid, int dim, Rng& rng) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    Vector v = gaussian(rng, dim);
    project_off(v, avoid);
    const double norm = v.norm();
    if (norm > 1e-6) return Vector(v / norm);
  }
  return std::nullopt;
}

Matrix generic_frame(int dim, int n, Rng& rng) {
  Matrix g(dim, n);
  for (int j = 0; j < n; ++j) g.col(j) = gaussian(rng, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dim, n);
}

// |P_l^T P_l - cos^2(theta) I|^2 summed over l, with P_l = E^T phi_l E, and its
// Euclidean gradient in E.
double slant_objective(const QuaternionStructure& q, const Matrix& e, double c2, Matrix* grad) {
  const auto n = e.cols();
  const Matrix id = Matrix::Identity(n, n);
  double f = 0.0;
  if (grad) grad->setZero(e.rows(), n);
  for (int l = 0; l < 3; ++l) {
    const Matrix ae = q.op(l) * e;
    const Matrix p = e.transpose() * ae;
    const Matrix m = p.transpose() * p - c2 * id;
    f += m.squaredNorm();
    if (grad) {
      const Matrix b = p * m + m * p;
      *grad -= 4.0 * ae * b;
    }
  }
  return f;
}

std::optional<Matrix> slant_frame(const QuaternionStructure& q, int n, double theta, Rng& rng) {
  const double c2 = std::cos(theta) * std::cos(theta);
  for (int attempt = 0; attempt < 6; ++attempt) {
    Matrix e = generic_frame(q.dim(), n, rng);
    Matrix grad;
    double f = slant_objective(q, e, c2, &grad);
    double eta = 0.1;
    for (int it = 0; it < 6000 && f > 1e-26; ++it) {
      const Matrix sym = e.transpose() * grad;
      const Matrix rgrad = grad - e * (0.5 * (sym + sym.transpose()));
      const double g2 = rgrad.squaredNorm();
      if (g2 < 1e-40) break;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        Eigen::HouseholderQR<Matrix> qr(e - eta * rgrad);
        Matrix cand = qr.householderQ() * Matrix::Identity(e.rows(), n);
        // Keep column orientation of the previous iterate.
        for (Eigen::Index j = 0; j < n; ++j) {
          if (cand.col(j).dot(e.col(j)) < 0) cand.col(j) = -cand.col(j);
        }
        Matrix cgrad;
        const double fc = slant_objective(q, cand, c2, &cgrad);
        if (fc <= f - 1e-4 * eta * g2) {
          e = std::move(cand);
          grad = std::move(cgrad);
          f = fc;
          eta *= 2.0;
          moved = true;
          break;
        }
        eta *= 0.5;
      }
      if (!moved) break;
    }
    if (f <= 1e-20) return e;
  }
  return std::nullopt;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

ClassTemplate ClassTemplate::parse(const std::string& s) {
  ClassTemplate t;
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  auto number = [&](double& out) {
    try {
      std::size_t used = 0;
      out = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_input, "bad class parameter '" + arg + "'");
    }
  };
  if (head == "generic" && arg.empty()) {
    t.kind = Kind::Generic;
  } else if ((head == "totally-real" || head == "totally_real") && arg.empty()) {
    t.kind = Kind::TotallyReal;
  } else if (head == "cr") {
    t.kind = Kind::CR;
    if (!arg.empty()) {
      double b = 0;
      number(b);
      if (b < 0 || b != std::floor(b)) throw Error(Errc::invalid_input, "cr blocks must be a nonnegative integer");
      t.cr_blocks = static_cast<int>(b);
    }
  } else if (head == "slant") {
    t.kind = Kind::Slant;
    if (!arg.empty()) number(t.theta);
    if (!(t.theta > 0 && t.theta <= M_PI / 2 + 1e-15)) {
      throw Error(Errc::invalid_input, "slant angle must lie in (0, pi/2]");
    }
  } else {
    throw Error(Errc::invalid_input, "unknown class '" + s +
                                         "' (generic, totally-real, cr[:blocks], slant[:theta])");
  }
  return t;
}

std::string ClassTemplate::to_string() const {
  switch (kind) {
    case Kind::Generic: return "generic";
    case Kind::TotallyReal: return "totally-real";
    case Kind::CR: return cr_blocks < 0 ? "cr" : "cr:" + std::to_string(cr_blocks);
    case Kind::Slant: return "slant:" + fmt17(theta);
  }
  return "generic";
}

namespace {

bool slant_is_totally_real(double theta) { return std::abs(theta - M_PI / 2) <= 1e-15; }

}  // namespace

int minimal_m(const ClassTemplate& cls, int n, int cr_blocks) {
  const int generic = n / 4 + 1;
  switch (cls.kind) {
    case ClassTemplate::Kind::Generic: return generic;
    case ClassTemplate::Kind::TotallyReal: return std::max(n, generic);
    case ClassTemplate::Kind::CR: {
      const int q = n - 4 * cr_blocks;
      return std::max(cr_blocks + q, generic);
    }
    case ClassTemplate::Kind::Slant:
      return slant_is_totally_real(cls.theta) ? std::max(n, generic) : std::max(2, generic);
  }
  return generic;
}

FrameSample sample_frame(const ClassTemplate& cls, int n, int cr_blocks,
                         const QuaternionStructure& q, Rng& rng) {
  FrameSample fs;
  const int dim = q.dim();
  if (n < 2 || n >= dim) {
    fs.reason = "need 2 <= n < 4m";
    return fs;
  }
  using K = ClassTemplate::Kind;

  // Constrained Gram-Schmidt: each new direction avoids Q(e) of the previous ones.
  auto totally_real = [&](int count, Matrix avoid) -> std::optional<Matrix> {
    Matrix out(dim, count);
    for (int j = 0; j < count; ++j) {
      auto v = draw_orthogonal(avoid, dim, rng);
      if (!v) return std::nullopt;
      out.col(j) = *v;
      avoid = append_cols(avoid, quaternionic_orbit(q, *v));
    }
    return out;
  };

  switch (cls.kind) {
    case K::Generic:
      fs.tangent = generic_frame(dim, n, rng);
      fs.tag = tag::Generic{};
      break;
    case K::TotallyReal: {
      if (n > q.m()) {
        fs.reason = "totally real needs n <= m";
        return fs;
      }
      auto t = totally_real(n, Matrix(dim, 0));
      if (!t) {
        fs.reason = "totally real construction degenerated";
        return fs;
      }
      fs.tangent = *t;
      fs.tag = tag::TotallyReal{};
      break;
    }
    case K::CR: {
      const int blocks = cr_blocks;
      const int qperp = n - 4 * blocks;
      if (blocks < 0 || qperp < 0) {
        fs.reason = "cr blocks exceed n/4";
        return fs;
      }
      if (blocks + qperp > q.m()) {
        fs.reason = "cr needs blocks + (n - 4 blocks) <= m";
        return fs;
      }
      Matrix d(dim, 0);
      for (int b = 0; b < blocks; ++b) {
        auto u = draw_orthogonal(d, dim, rng);
        if (!u) {
          fs.reason = "cr construction degenerated";
          return fs;
        }
        d = append_cols(d, quaternionic_orbit(q, *u));
      }
      auto perp = totally_real(qperp, d);
      if (!perp) {
        fs.reason = "cr construction degenerated";
        return fs;
      }
      fs.tangent = append_cols(d, *perp);
      tag::CR tg;
      for (int i = 0; i < 4 * blocks; ++i) tg.invariant.push_back(i);
      fs.tag = tg;
      break;
    }
    case K::Slant: {
      if (slant_is_totally_real(cls.theta)) {
        if (n > q.m()) {
          fs.reason = "slant(pi/2) needs n <= m";
          return fs;
        }
        auto t = totally_real(n, Matrix(dim, 0));
        if (!t) {
          fs.reason = "totally real construction degenerated";
          return fs;
        }
        fs.tangent = *t;
      } else {
        if (n % 2 == 1) {
          fs.reason = "proper slant needs even n (P_l is skew with equal singular values)";
          return fs;
        }
        auto e = slant_frame(q, n, cls.theta, rng);
        if (!e) {
          fs.reason = "slant penalty minimization did not converge";
          return fs;
        }
        fs.tangent = *e;
      }
      fs.tag = tag::Slant{cls.theta};
      break;
    }
  }
  fs.normal = orthonormal_complement(fs.tangent);

  const AmbientSpaceForm probe(q, 0.0);
  const SubmanifoldPoint pt(probe, fs.tangent, fs.normal, {}, fs.tag);
  const ClassReport cr = check_class(pt, kSlantCheckTol);
  if (!cr.pass) {
    fs.reason = "class certification failed: " + cr.detail;
    return fs;
  }
  fs.feasible = true;
  return fs;
}

void CampaignConfig::validate() const {
  if (trials < 1) throw Error(Errc::invalid_input, "trials must be >= 1");
  if (n_min < 2 || n_max < n_min) throw Error(Errc::invalid_input, "need 2 <= n_min <= n_max");
  if (m_min < 1) throw Error(Errc::invalid_input, "m_min must be >= 1");
  if (m_max != 0 && m_max < m_min) throw Error(Errc::invalid_input, "m_max must be >= m_min");
  if (m_max > 8) throw Error(Errc::invalid_input, "m_max must be <= 8");
  if (c_values.empty()) throw Error(Errc::invalid_input, "no curvature constants given");
  for (double c : c_values) {
    if (!std::isfinite(c)) throw Error(Errc::invalid_input, "curvature constants must be finite");
  }
  if (sff_scales.empty()) throw Error(Errc::invalid_input, "no sff scales given");
  for (double s : sff_scales) {
    if (!(s >= 0 && std::isfinite(s))) throw Error(Errc::invalid_input, "sff scales must be >= 0");
  }
  if (!(tol >= 0)) throw Error(Errc::invalid_input, "tol must be >= 0");
  if (random_directions < 0) throw Error(Errc::invalid_input, "random directions must be >= 0");
  if (m_max > 0) {
    for (int n = n_min; n <= n_max; ++n) {
      int need = minimal_m(cls, n, 0);
      if (cls.kind == ClassTemplate::Kind::CR) {
        need = std::numeric_limits<int>::max();
        const int lo = cls.cr_blocks < 0 ? 0 : cls.cr_blocks;
        const int hi = cls.cr_blocks < 0 ? n / 4 : cls.cr_blocks;
        for (int b = lo; b <= hi; ++b) need = std::min(need, minimal_m(cls, n, b));
      }
      if (need > m_max) {
        throw Error(Errc::invalid_input, "class " + cls.to_string() + " with n = " +
                                             std::to_string(n) + " needs m >= " + std::to_string(need));
      }
    }
  }
  if (cls.kind == ClassTemplate::Kind::CR && cls.cr_blocks > 0 && 4 * cls.cr_blocks > n_max) {
    throw Error(Errc::invalid_input, "cr blocks exceed n/4");
  }
}

std::uint64_t CampaignConfig::hash() const {
  std::ostringstream os;
  os << seed << '|' << trials << '|' << n_min << ':' << n_max << '|' << m_min << ':' << m_max << '|';
  for (double c : c_values) os << fmt17(c) << ',';
  os << '|' << qcurv::to_string(convention) << '|' << cls.to_string() << '|';
  for (BoundId b : bounds) os << qcurv::to_string(b) << ',';
  os << '|';
  for (double s : sff_scales) os << fmt17(s) << ',';
  os << '|' << fmt17(tol) << '|' << random_directions;
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

SampledTrial sample_point(const CampaignConfig& config, Rng& rng) {
  SampledTrial st;
  st.n = uniform_int(rng, config.n_min, config.n_max);
  st.c = pick(config.c_values, rng);
  st.sff_scale = pick(config.sff_scales, rng);
  int blocks = 0;
  if (config.cls.kind == ClassTemplate::Kind::CR) {
    blocks = config.cls.cr_blocks >= 0 ? config.cls.cr_blocks : uniform_int(rng, 0, st.n / 4);
  }
  const int lo = std::max(config.m_min, minimal_m(config.cls, st.n, blocks));
  const int hi = config.m_max > 0 ? config.m_max : lo + 1;
  if (lo > hi) {
    st.reject_reason = "no feasible m for n = " + std::to_string(st.n);
    return st;
  }
  st.m = uniform_int(rng, lo, hi);
  const QuaternionStructure q = QuaternionStructure::standard(st.m);
  FrameSample fs = sample_frame(config.cls, st.n, blocks, q, rng);
  if (!fs.feasible) {
    st.reject_reason = fs.reason;
    return st;
  }
  const int codim = 4 * st.m - st.n;
  std::vector<Matrix> h;
  h.reserve(static_cast<std::size_t>(codim));
  std::normal_distribution<double> g;
  for (int a = 0; a < codim; ++a) {
    Matrix raw(st.n, st.n);
    for (int i = 0; i < st.n; ++i) {
      for (int j = 0; j < st.n; ++j) raw(i, j) = g(rng);
    }
    h.push_back(st.sff_scale * (raw + raw.transpose()) / std::sqrt(2.0));
  }
  st.point.emplace(AmbientSpaceForm(q, st.c, config.convention), std::move(fs.tangent),
                   std::move(fs.normal), std::move(h), std::move(fs.tag));
  return st;
}

SampledTrial sample_point(const CampaignConfig& config, std::uint64_t trial) {
  Rng rng = make_rng(config.seed, kSampleStream, trial);
  return sample_point(config, rng);
}

long CampaignResult::count(Status s) const {
  long total = 0;
  for (const auto& [id, b] : summary) {
    total += s == Status::satisfied ? b.satisfied : s == Status::equality ? b.equality : b.violated;
  }
  return total;
}

namespace {

struct Probe {
  std::string label;
  Vector x;
  std::optional<Vector> y;
};

std::vector<Probe> directions_for(const SubmanifoldPoint& p, const BoundInfo& bi,
                                  const std::vector<int>& idx, int random_dirs, Rng& rng) {
  const int n = p.n();
  std::vector<Probe> out;
  if (bi.sectional) {
    for (int i = 0; i + 1 < n; ++i) {
      out.push_back({"e" + std::to_string(i + 1) + "e" + std::to_string(i + 2), Vector::Unit(n, i),
                     Vector(Vector::Unit(n, i + 1))});
    }
    for (int r = 0; r < random_dirs; ++r) {
      Vector x = gaussian(rng, n).normalized();
      Vector y = gaussian(rng, n);
      y -= y.dot(x) * x;
      out.push_back({"r" + std::to_string(r + 1), x, Vector(y.normalized())});
    }
    return out;
  }
  for (int i : idx) out.push_back({"e" + std::to_string(i + 1), Vector::Unit(n, i), std::nullopt});
  for (int r = 0; r < random_dirs; ++r) {
    Vector x = Vector::Zero(n);
    const Vector g = gaussian(rng, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = g[static_cast<Eigen::Index>(k)];
    out.push_back({"r" + std::to_string(r + 1), x.normalized(), std::nullopt});
  }
  return out;
}

struct TrialOutput {
  std::vector<ReportRow> rows;
  std::vector<std::pair<BoundId, BoundReport>> reports;
  std::vector<Violation> violations;
  bool rejected = false;
  std::string reject_reason;
  long not_applicable = 0;
};

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  if (config.bounds.empty()) throw Error(Errc::invalid_input, "no bounds selected");

  std::vector<TrialOutput> outputs(static_cast<std::size_t>(config.trials));
  parallel_for(outputs.size(), config.threads, [&](std::size_t t) {
    TrialOutput& out = outputs[t];
    const SampledTrial st = sample_point(config, static_cast<std::uint64_t>(t));
    if (!st.point) {
      out.rejected = true;
      out.reject_reason = st.reject_reason;
      return;
    }
    const SubmanifoldPoint& p = *st.point;
    const DerivedInvariants inv = derive(p);
    Rng dir_rng = make_rng(config.seed, kDirectionStream, t);
    for (BoundId id : config.bounds) {
      const BoundInfo& bi = info(id);
      const auto idx = admissible_indices(p, id);
      if (!idx) {
        ++out.not_applicable;
        continue;
      }
      for (const Probe& pr : directions_for(p, bi, *idx, config.random_directions, dir_rng)) {
        BoundReport rep = evaluate(p, inv, id, pr.x, pr.y, config.tol);
        ReportRow row = make_row(rep, t, p, pr.label);
        out.rows.push_back(std::move(row));
        if (rep.status == Status::violated) {
          out.violations.push_back({t, id, pr.label, pr.x, pr.y, p, rep.relative_violation()});
        }
        out.reports.emplace_back(id, std::move(rep));
      }
    }
  });

  CampaignResult res;
  for (BoundId id : config.bounds) res.summary[id];
  for (auto& out : outputs) {
    if (out.rejected) {
      ++res.rejected;
      if (std::find(res.reject_reasons.begin(), res.reject_reasons.end(), out.reject_reason) ==
          res.reject_reasons.end()) {
        res.reject_reasons.push_back(out.reject_reason);
      }
      continue;
    }
    res.not_applicable += out.not_applicable;
    for (auto& [id, rep] : out.reports) {
      BoundSummary& s = res.summary[id];
      switch (rep.status) {
        case Status::satisfied: ++s.satisfied; break;
        case Status::equality: ++s.equality; break;
        case Status::violated: ++s.violated; break;
      }
      double row_min = std::numeric_limits<double>::infinity();
      if (rep.gap_lower) {
        const double g = *rep.gap_lower / rep.scale();
        s.min_rel_gap_lower = std::min(s.min_rel_gap_lower, g);
        row_min = std::min(row_min, g);
      }
      if (rep.gap_upper) {
        const double g = *rep.gap_upper / rep.scale();
        s.min_rel_gap_upper = std::min(s.min_rel_gap_upper, g);
        row_min = std::min(row_min, g);
      }
      s.rel_gaps.push_back(row_min);
    }
    std::move(out.rows.begin(), out.rows.end(), std::back_inserter(res.rows));
    std::move(out.violations.begin(), out.violations.end(), std::back_inserter(res.violations));
  }
  return res;
}

namespace {

enum class Goal { Violate, Equalize };

struct SearchState {
  Matrix tangent;
  Matrix normal;
  std::vector<Matrix> h;
  Vector u;  // direction coefficients over the admissible indices
  Vector w;  // second direction (sectional bounds), full tangent coordinates
};

struct Evaluated {
  double score = -std::numeric_limits<double>::infinity();  // maximized
  double objective = 0.0;                                   // reported value
  std::optional<SubmanifoldPoint> point;
  Vector x;
  std::optional<Vector> y;
  std::optional<BoundReport> report;
};

struct RestartOutcome {
  bool ran = false;
  Evaluated best;
  long evaluations = 0;
  long improvements = 0;
};

double equality_objective(const BoundReport& r) {
  double g = 0.0;
  if (r.gap_lower) g = std::max(g, std::abs(*r.gap_lower));
  if (r.gap_upper) g = std::max(g, std::abs(*r.gap_upper));
  return g / r.scale();
}

Evaluated evaluate_state(const SubmanifoldPoint& base, const SearchState& s, BoundId id,
                         const std::vector<int>& idx, Goal goal, double rel_tol) {
  Evaluated ev;
  const int n = base.n();
  Vector x = Vector::Zero(n);
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = s.u[static_cast<Eigen::Index>(k)];
  const double xn = x.norm();
  if (!(xn > 1e-12)) return ev;
  x /= xn;
  std::optional<Vector> y;
  if (info(id).sectional) {
    Vector v = s.w - s.w.dot(x) * x;
    const double vn = v.norm();
    if (!(vn > 1e-12)) return ev;
    v /= vn;
    v -= v.dot(x) * x;  // second pass
    y = v.normalized();
  }
  SubmanifoldPoint p(base.ambient(), s.tangent, s.normal, s.h, base.class_tag());
  BoundReport rep = evaluate(p, id, x, y, rel_tol);
  if (goal == Goal::Violate) {
    ev.objective = rep.relative_violation();
    ev.score = ev.objective;
  } else {
    ev.objective = equality_objective(rep);
    ev.score = -ev.objective;
  }
  ev.point.emplace(std::move(p));
  ev.x = std::move(x);
  ev.y = std::move(y);
  ev.report = std::move(rep);
  return ev;
}

RestartOutcome run_restart(const CampaignConfig& config, BoundId id, int steps, Goal goal,
                           Rng& rng) {
  RestartOutcome out;
  const SampledTrial st = sample_point(config, rng);
  if (!st.point) return out;
  const SubmanifoldPoint& base = *st.point;
  const auto idx_opt = admissible_indices(base, id);
  if (!idx_opt) return out;
  const std::vector<int>& idx = *idx_opt;
  const int n = base.n();
  const auto k = static_cast<Eigen::Index>(idx.size());
  const bool sectional = info(id).sectional;
  const bool frame_moves = std::holds_alternative<tag::Generic>(base.class_tag());
  out.ran = true;

  SearchState s{base.tangent(), base.normal(), base.sff(), Vector::Zero(k), Vector::Zero(n)};
  double h_norm = 0.0;
  for (const auto& h : s.h) h_norm += h.squaredNorm();
  h_norm = std::sqrt(h_norm);

  // Start from the best frame direction (or frame plane).
  Evaluated cur;
  auto consider = [&](SearchState cand) {
    Evaluated ev = evaluate_state(base, cand, id, idx, goal, config.tol);
    ++out.evaluations;
    if (ev.score > cur.score) {
      cur = std::move(ev);
      s = std::move(cand);
      return true;
    }
    return false;
  };
  if (sectional) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        SearchState cand = s;
        cand.u = Vector::Unit(k, i);
        cand.w = Vector::Unit(n, j);
        consider(std::move(cand));
      }
    }
  } else {
    for (Eigen::Index i = 0; i < k; ++i) {
      SearchState cand = s;
      cand.u = Vector::Unit(k, i);
      consider(std::move(cand));
    }
  }

  const double sigma = st.sff_scale;
  double step = 0.5;
  int fails = 0;
  const int codim = base.codim();
  for (int it = 0; it < steps && step >= 1e-10; ++it) {
    SearchState cand = s;
    const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    const double r = uniform01(rng);
    const double p_h = frame_moves ? 0.5 : 0.6;
    const double p_dir = frame_moves ? 0.8 : 1.0;
    if (r < p_h) {
      const int a = uniform_int(rng, 0, codim - 1);
      const int i = uniform_int(rng, 0, n - 1);
      const int j = uniform_int(rng, 0, n - 1);
      Matrix& h = cand.h[static_cast<std::size_t>(a)];
      h(i, j) += sign * step * sigma;
      h(j, i) = h(i, j);
      if (goal == Goal::Equalize && h_norm > 0) {
        double now = 0.0;
        for (const auto& hh : cand.h) now += hh.squaredNorm();
        const double f = h_norm / std::sqrt(now);
        for (auto& hh : cand.h) hh *= f;
      }
    } else if (r < p_dir) {
      if (sectional && uniform01(rng) < 0.5) {
        cand.w[uniform_int(rng, 0, n - 1)] += sign * step;
      } else {
        cand.u[uniform_int(rng, 0, static_cast<int>(k) - 1)] += sign * step;
      }
    } else {
      // Rotate a tangent vector into a normal direction; keeps both frames orthonormal.
      const int i = uniform_int(rng, 0, n - 1);
      const int a = uniform_int(rng, 0, codim - 1);
      const double ang = sign * step;
      const Vector t = cand.tangent.col(i);
      const Vector v = cand.normal.col(a);
      cand.tangent.col(i) = std::cos(ang) * t + std::sin(ang) * v;
      cand.normal.col(a) = -std::sin(ang) * t + std::cos(ang) * v;
    }
    if (consider(std::move(cand))) {
      ++out.improvements;
      fails = 0;
    } else if (++fails >= 20) {
      step *= 0.5;
      fails = 0;
    }
  }

  // Frame directions again with the final h.
  if (!sectional) {
    for (Eigen::Index i = 0; i < k; ++i) {
      SearchState cand = s;
      cand.u = Vector::Unit(k, i);
      consider(std::move(cand));
    }
  }
  out.best = std::move(cur);
  return out;
}

SearchResult run_search(const CampaignConfig& config, BoundId id, SearchBudget budget, Goal goal) {
  config.validate();
  if (budget.restarts < 1 || budget.steps < 0) {
    throw Error(Errc::invalid_input, "budget needs restarts >= 1 and steps >= 0");
  }
  const std::uint64_t stream = goal == Goal::Violate ? kFalsifyStream : kEqualityStream;
  std::vector<RestartOutcome> outs(static_cast<std::size_t>(budget.restarts));
  parallel_for(outs.size(), config.threads, [&](std::size_t r) {
    Rng rng = make_rng(config.seed, stream, r);
    outs[r] = run_restart(config, id, budget.steps, goal, rng);
  });

  SearchResult res;
  res.bound = id;
  res.seed = config.seed;
  res.config_hash = config.hash();
  res.best_objective = goal == Goal::Violate ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity();
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < outs.size(); ++r) {
    RestartOutcome& o = outs[r];
    res.evaluations += o.evaluations;
    res.improvements += o.improvements;
    if (!o.ran || !o.best.point) {
      ++res.restarts_skipped;
      continue;
    }
    ++res.restarts_run;
    // Strict comparison: ties keep the lowest restart index.
    if (o.best.score > best_score) {
      best_score = o.best.score;
      res.best_objective = o.best.objective;
      res.best_restart = static_cast<int>(r);
      res.witness = std::move(o.best.point);
      res.direction = o.best.x;
      res.direction2 = o.best.y;
      res.report = o.best.report;
    }
  }
  if (goal == Goal::Equalize && res.witness && res.best_objective < kEqualityDiagnoseThreshold) {
    res.diagnosis = diagnose(*res.witness);
  }
  return res;
}

}  // namespace

SearchResult falsify(const CampaignConfig& config, BoundId bound, SearchBudget budget) {
  return run_search(config, bound, budget, Goal::Violate);
}

SearchResult approach_equality(const CampaignConfig& config, BoundId bound, SearchBudget budget) {
  return run_search(config, bound, budget, Goal::Equalize);
}

double reevaluate_violation(const SearchResult& r, double rel_tol) {
  if (!r.witness) throw Error(Errc::invalid_input, "search produced no witness");
  return evaluate(*r.witness, r.bound, r.direction, r.direction2, rel_tol).relative_violation();
}

}  // namespace qcurv
