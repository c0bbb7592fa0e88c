#include "qcurv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcurv/point_file.hpp"
#include "qcurv/report.hpp"

namespace qcurv {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct CampaignFlags {
  std::uint64_t seed = 1;
  int trials = 100;
  std::string n = "2:5";
  std::string m = "auto";
  std::vector<double> c{1.0};
  std::string convention = "eq21";
  std::string cls = "generic";
  std::string bounds;
  std::vector<double> sff_scale{1.0};
  double tol = 1e-9;
  int directions = 1;
  int threads = 1;
};

void add_campaign_flags(CLI::App* app, CampaignFlags& f) {
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--n", f.n, "Tangent dimension: N or LO:HI")->capture_default_str();
  app->add_option("--m", f.m, "Quaternionic dimension: auto, M or LO:HI")->capture_default_str();
  app->add_option("--c", f.c, "Curvature constants (comma separated)")->delimiter(',')->capture_default_str();
  app->add_option("--convention", f.convention, "eq21, qp4c or tilde")->capture_default_str();
  app->add_option("--class", f.cls, "generic, totally-real, cr[:blocks], slant[:theta]")->capture_default_str();
  app->add_option("--sff-scale", f.sff_scale, "Standard deviations of h entries (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--tol", f.tol, "Relative status tolerance")->capture_default_str();
  app->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
}

std::pair<int, int> parse_range(const std::string& s, const char* flag) {
  try {
    const auto colon = s.find(':');
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {v, v};
    }
    const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error(Errc::invalid_input, std::string(flag) + ": expected N or LO:HI, got '" + s + "'");
  }
}

std::string default_bounds(const ClassTemplate& cls) {
  switch (cls.kind) {
    case ClassTemplate::Kind::TotallyReal: return "qproj.*";
    case ClassTemplate::Kind::CR: return "cr.*";
    case ClassTemplate::Kind::Slant: return "slant.*";
    case ClassTemplate::Kind::Generic: break;
  }
  return "chen_ricci.general,hineva_sqrt.general,a1.sectional_lower,a2.sectional_upper,a3.ricci_upper,"
         "a4.ricci_lower";
}

CampaignConfig to_config(const CampaignFlags& f) {
  CampaignConfig cfg;
  cfg.seed = f.seed;
  cfg.trials = f.trials;
  std::tie(cfg.n_min, cfg.n_max) = parse_range(f.n, "--n");
  if (f.m == "auto") {
    cfg.m_min = 1;
    cfg.m_max = 0;
  } else {
    std::tie(cfg.m_min, cfg.m_max) = parse_range(f.m, "--m");
  }
  cfg.c_values = f.c;
  const auto conv = parse_convention(f.convention);
  if (!conv) throw Error(Errc::invalid_input, "--convention: expected eq21, qp4c or tilde");
  cfg.convention = *conv;
  cfg.cls = ClassTemplate::parse(f.cls);
  cfg.bounds = parse_bound_list(f.bounds.empty() ? default_bounds(cfg.cls) : f.bounds);
  cfg.sff_scales = f.sff_scale;
  cfg.tol = f.tol;
  cfg.random_directions = f.directions;
  cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

json opt_json(const std::optional<double>& v) { return v && std::isfinite(*v) ? json(*v) : json(); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json report_json(const BoundReport& r) {
  return {{"bound", std::string(to_string(r.id))},
          {"lhs", r.lhs},
          {"lower", opt_json(r.lower)},
          {"upper", opt_json(r.upper)},
          {"gap_lower", opt_json(r.gap_lower)},
          {"gap_upper", opt_json(r.gap_upper)},
          {"relative_violation", r.relative_violation()},
          {"status", std::string(to_string(r.status))}};
}

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  }
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::invalid_input, "cannot write '" + path + "'");
  f << text;
}

// Writes JSON to `path`, or to `out` when path is empty or "-".
void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << '\n';
  } else {
    write_text(path, j.dump(2) + "\n");
  }
}

int cmd_verify(const CampaignFlags& f, const std::string& out_path, const std::string& witness_dir,
               const std::string& plot_path, const std::string& summary_path, std::ostream& out,
               std::ostream& err) {
  const CampaignConfig cfg = to_config(f);
  const CampaignResult res = run_campaign(cfg);

  std::ostream* csv = &out;
  std::ofstream file;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) throw Error(Errc::invalid_input, "cannot write '" + out_path + "'");
    csv = &file;
  }
  write_csv(*csv, res.rows);
  std::ostream& log = csv == &out ? err : out;

  if (!plot_path.empty()) {
    std::ofstream plot(plot_path);
    if (!plot) throw Error(Errc::invalid_input, "cannot write '" + plot_path + "'");
    write_gap_histogram(plot, res);
  }

  json summary;
  summary["seed"] = cfg.seed;
  summary["config_hash"] = cfg.hash();
  summary["trials"] = cfg.trials;
  summary["rejected"] = res.rejected;
  summary["reject_reasons"] = res.reject_reasons;
  summary["not_applicable"] = res.not_applicable;
  summary["rows"] = res.rows.size();
  summary["violations"] = res.violations.size();
  json per_bound = json::object();
  for (const auto& [id, s] : res.summary) {
    per_bound[std::string(to_string(id))] = {{"satisfied", s.satisfied},
                                             {"equality", s.equality},
                                             {"violated", s.violated},
                                             {"min_rel_gap_lower", finite_or_null(s.min_rel_gap_lower)},
                                             {"min_rel_gap_upper", finite_or_null(s.min_rel_gap_upper)}};
    log << to_string(id) << ": satisfied=" << s.satisfied << " equality=" << s.equality
        << " violated=" << s.violated << " min_rel_gap_lower=" << format_double(s.min_rel_gap_lower)
        << " min_rel_gap_upper=" << format_double(s.min_rel_gap_upper) << '\n';
  }
  summary["bounds"] = std::move(per_bound);
  if (res.rejected > 0) {
    log << "rejected trials: " << res.rejected << " of " << cfg.trials << '\n';
    for (const auto& r : res.reject_reasons) log << "  " << r << '\n';
  }

  if (!res.violations.empty()) {
    fs::create_directories(witness_dir);
    constexpr std::size_t kMaxWitnesses = 100;
    json files = json::array();
    for (std::size_t i = 0; i < std::min(kMaxWitnesses, res.violations.size()); ++i) {
      const Violation& v = res.violations[i];
      const std::string name = sanitize(std::string(to_string(v.bound))) + "_trial" +
                               std::to_string(v.trial) + "_" + sanitize(v.direction) + ".json";
      const std::string path = (fs::path(witness_dir) / name).string();
      save_point_file(path, v.point,
                      WitnessInfo{v.bound, v.x, v.y, v.relative_violation, cfg.seed, cfg.hash()});
      files.push_back(path);
    }
    summary["witness_files"] = files;
    log << res.violations.size() << " violation(s); witnesses in " << witness_dir << '\n';
  }
  if (!summary_path.empty()) emit_json(summary, summary_path, log);

  if (res.rows.empty()) {
    err << "error: no admissible (trial, bound) pair was evaluated\n";
    return kExitInvalid;
  }
  return res.violations.empty() ? kExitOk : kExitViolation;
}

struct Direction {
  std::string label;
  Vector x;
  std::optional<Vector> y;
};

Vector parse_coords(const std::string& s, int n) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw Error(Errc::invalid_input, "--direction: bad coordinate '" + tok + "'");
    }
  }
  if (static_cast<int>(vals.size()) != n) {
    throw Error(Errc::invalid_input, "--direction: expected " + std::to_string(n) + " tangent coordinates");
  }
  Vector v = Eigen::Map<Vector>(vals.data(), n);
  const double norm = v.norm();
  if (!(norm > 0)) throw Error(Errc::invalid_input, "--direction: zero vector");
  return v / norm;
}

// Parses "e3", "e1e2" or "x1,...,xn" (normalized).
std::optional<int> frame_index(const std::string& s, int n) {
  if (s.size() < 2 || s[0] != 'e') return std::nullopt;
  const std::string digits = s.substr(1);
  if (!std::all_of(digits.begin(), digits.end(), ::isdigit)) return std::nullopt;
  const int i = std::stoi(digits);
  if (i < 1 || i > n) throw Error(Errc::invalid_input, "--direction: frame index must lie in 1.." + std::to_string(n));
  return i - 1;
}

std::vector<Direction> directions_for(const SubmanifoldPoint& p, const BoundInfo& bi, const std::string& spec,
                                      const std::optional<WitnessInfo>& witness) {
  const int n = p.n();
  std::vector<Direction> out;
  if (spec == "witness") {
    if (!witness) throw Error(Errc::invalid_input, "--direction witness: the point file has no witness block");
    out.push_back({"witness", witness->direction, witness->direction2});
    return out;
  }
  if (spec == "all-frame") {
    if (bi.sectional) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          out.push_back({"e" + std::to_string(i + 1) + "e" + std::to_string(j + 1), Vector::Unit(n, i),
                         Vector(Vector::Unit(n, j))});
        }
      }
    } else {
      const auto idx = admissible_indices(p, bi.id);
      for (int i : *idx) out.push_back({"e" + std::to_string(i + 1), Vector::Unit(n, i), std::nullopt});
    }
    return out;
  }
  if (const auto i = frame_index(spec, n)) {
    if (bi.sectional) {
      for (int j = 0; j < n; ++j) {
        if (j == *i) continue;
        out.push_back({spec + "e" + std::to_string(j + 1), Vector::Unit(n, *i), Vector(Vector::Unit(n, j))});
      }
    } else {
      out.push_back({spec, Vector::Unit(n, *i), std::nullopt});
    }
    return out;
  }
  const auto second = spec.find('e', 1);
  if (spec[0] == 'e' && second != std::string::npos) {
    const auto i = frame_index(spec.substr(0, second), n);
    const auto j = frame_index(spec.substr(second), n);
    if (i && j) {
      if (*i == *j) throw Error(Errc::invalid_input, "--direction: plane needs two distinct frame vectors");
      if (!bi.sectional) throw Error(Errc::invalid_input, "--direction: a plane is only meaningful for sectional bounds");
      out.push_back({spec, Vector::Unit(n, *i), Vector(Vector::Unit(n, *j))});
      return out;
    }
  }
  const auto semi = spec.find(';');
  if (semi != std::string::npos) {
    if (!bi.sectional) throw Error(Errc::invalid_input, "--direction: X;Y is only meaningful for sectional bounds");
    const Vector x = parse_coords(spec.substr(0, semi), n);
    Vector y = parse_coords(spec.substr(semi + 1), n);
    y -= y.dot(x) * x;
    if (!(y.norm() > 1e-12)) throw Error(Errc::invalid_input, "--direction: X and Y are parallel");
    out.push_back({"custom", x, Vector(y.normalized())});
    return out;
  }
  if (bi.sectional) throw Error(Errc::invalid_input, "--direction: sectional bounds need a plane (eIeJ or X;Y)");
  out.push_back({"custom", parse_coords(spec, n), std::nullopt});
  return out;
}

int cmd_point(const std::string& file, const std::string& bounds_flag, std::string direction, double tol,
              std::ostream& out, std::ostream& err) {
  const PointDocument doc = load_point_file(file);
  const SubmanifoldPoint& p = doc.point;
  std::vector<BoundId> ids;
  bool explicit_bounds = !bounds_flag.empty();
  if (explicit_bounds) {
    ids = parse_bound_list(bounds_flag);
  } else if (doc.witness) {
    ids = {doc.witness->bound};
    explicit_bounds = true;
  } else {
    ids = parse_bound_list("*");
  }
  if (direction.empty()) direction = doc.witness ? "witness" : "all-frame";

  const DerivedInvariants inv = derive(p);
  std::vector<ReportRow> rows;
  bool violated = false;
  for (BoundId id : ids) {
    const BoundInfo& bi = info(id);
    if (!admissible_indices(p, id)) {
      if (explicit_bounds) {
        throw Error(Errc::wrong_distribution, std::string(bi.name) + " does not apply to a " +
                                                  class_name(p.class_tag()) + " point");
      }
      continue;
    }
    for (const Direction& d : directions_for(p, bi, direction, doc.witness)) {
      const BoundReport r = evaluate(p, inv, id, d.x, d.y, tol);
      violated = violated || r.status == Status::violated;
      rows.push_back(make_row(r, 0, p, d.label));
    }
  }
  write_csv(out, rows);
  if (rows.empty()) {
    err << "error: no bound applies to this point\n";
    return kExitInvalid;
  }
  return violated ? kExitViolation : kExitOk;
}

struct SearchFlags {
  std::string bound;
  int restarts = 100;
  int steps = 200;
  std::string witness;
  std::string summary;
};

int cmd_search(bool equality, const CampaignFlags& f, const SearchFlags& s, std::ostream& out, std::ostream& err) {
  CampaignFlags flags = f;
  flags.bounds = s.bound;
  flags.trials = 1;
  const auto ids = parse_bound_list(s.bound);
  if (ids.size() != 1) throw Error(Errc::invalid_input, "--bound: give exactly one bound identifier");
  const CampaignConfig cfg = to_config(flags);
  const SearchBudget budget{s.restarts, s.steps};
  const SearchResult r = equality ? approach_equality(cfg, ids[0], budget) : falsify(cfg, ids[0], budget);

  json j;
  j["mode"] = equality ? "equality" : "falsify";
  j["bound"] = std::string(to_string(r.bound));
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["budget"] = {{"restarts", s.restarts}, {"steps", s.steps}};
  j["restarts_run"] = r.restarts_run;
  j["restarts_skipped"] = r.restarts_skipped;
  j["evaluations"] = r.evaluations;
  j["improvements"] = r.improvements;
  j["best_restart"] = r.best_restart;
  j[equality ? "best_gap" : "best_violation"] = finite_or_null(r.best_objective);
  if (r.report) j["report"] = report_json(*r.report);
  if (r.witness) {
    j["direction"] = vector_json(r.direction);
    if (r.direction2) j["direction2"] = vector_json(*r.direction2);
  }

  const bool violated = r.report && r.report->status == Status::violated;
  std::string witness_path = s.witness;
  if (witness_path.empty() && violated) witness_path = "witness_" + sanitize(std::string(to_string(r.bound))) + ".json";
  if (!witness_path.empty() && r.witness) {
    save_point_file(witness_path, *r.witness,
                    WitnessInfo{r.bound, r.direction, r.direction2, r.best_objective, r.seed, r.config_hash});
    j["witness_file"] = witness_path;
  }

  if (equality) {
    j["converged"] = r.best_objective < 1e-8;
    if (r.witness && !info(r.bound).sectional) {
      // Equality in the mean-curvature upper bound forces 2 h(X,X) = n H.
      const SubmanifoldPoint& w = *r.witness;
      double h_norm = 0.0;
      for (const Matrix& h : w.sff()) h_norm += h.squaredNorm();
      const double res = upper_equality_residual(w, r.direction);
      j["residual_2hXX_minus_nH"] = res;
      j["umbilical_at_direction"] = res <= 1e-4 * std::max(1.0, std::sqrt(h_norm));
    }
    if (r.diagnosis) {
      const EqualityDiagnosis& d = *r.diagnosis;
      json dj;
      dj["is_quasi_umbilical"] = d.is_quasi_umbilical;
      dj["ratio_invariant"] = d.ratio_invariant;
      dj["null_space_dim"] = d.null_space_basis.cols();
      if (d.lambda_direction) dj["lambda_direction"] = vector_json(*d.lambda_direction);
      if (d.is_quasi_umbilical) {
        json pairs = json::array();
        for (const EigenPair& ep : d.eigen_pairs) {
          if (!ep.active) continue;
          pairs.push_back({{"lambda", ep.lambda}, {"mu", ep.mu}, {"umbilical", ep.umbilical}});
        }
        dj["eigen_pairs"] = pairs;
      }
      if (d.lambda_direction) {
        const double align = std::abs(d.lambda_direction->dot(r.direction));
        dj["direction_alignment"] = align;
      }
      j["diagnosis"] = std::move(dj);
    }
  }
  emit_json(j, s.summary, out);
  if (!r.witness) {
    err << "error: no restart produced an admissible point (check --class, --n, --m)\n";
    return kExitInvalid;
  }
  return violated ? kExitViolation : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks of Ricci and sectional curvature bounds for submanifolds of quaternionic space forms",
               "qcurv"};
  app.require_subcommand(1);

  CampaignFlags vf;
  std::string v_out, v_witness_dir = "witnesses", v_plot, v_summary;
  auto* verify = app.add_subcommand("verify", "Run a seeded random campaign and write a CSV report");
  add_campaign_flags(verify, vf);
  verify->add_option("--trials", vf.trials, "Number of random points")->capture_default_str();
  verify->add_option("--bounds", vf.bounds, "Bound identifiers, comma separated; prefix.* globs allowed");
  verify->add_option("--directions", vf.directions, "Random directions per bound, beyond frame vectors")
      ->capture_default_str();
  verify->add_option("--out", v_out, "CSV output file (default stdout)");
  verify->add_option("--witness-dir", v_witness_dir, "Directory for violation witnesses")->capture_default_str();
  verify->add_option("--plot", v_plot, "Write gap histogram CSV to this file");
  verify->add_option("--summary", v_summary, "Write summary JSON to this file ('-' for the log stream)");

  std::string p_file, p_bounds, p_direction;
  double p_tol = 1e-9;
  auto* point = app.add_subcommand("point", "Evaluate bounds at a point read from a JSON file");
  point->add_option("file", p_file, "Point file")->required();
  point->add_option("--bounds", p_bounds, "Bound identifiers (default: all that apply)");
  point->add_option("--direction", p_direction,
                    "e<i>, e<i>e<j>, all-frame, witness, or tangent coordinates x1,...,xn (X;Y for planes)");
  point->add_option("--tol", p_tol, "Relative status tolerance")->capture_default_str();

  CampaignFlags ff, ef;
  SearchFlags fs_flags, es_flags;
  auto* falsify_cmd = app.add_subcommand("falsify", "Search for a violation of one bound");
  auto* equality_cmd = app.add_subcommand("equality", "Search for equality in one bound and diagnose the witness");
  for (auto [cmd, cf, sf] : {std::tuple{falsify_cmd, &ff, &fs_flags}, std::tuple{equality_cmd, &ef, &es_flags}}) {
    add_campaign_flags(cmd, *cf);
    cmd->add_option("--bound", sf->bound, "Bound identifier")->required();
    cmd->add_option("--restarts", sf->restarts, "Random restarts")->capture_default_str();
    cmd->add_option("--steps", sf->steps, "Hill-climbing steps per restart")->capture_default_str();
    cmd->add_option("--witness", sf->witness, "Write the best point to this file");
    cmd->add_option("--summary", sf->summary, "Write summary JSON to this file (default stdout)");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*verify) return cmd_verify(vf, v_out, v_witness_dir, v_plot, v_summary, out, err);
    if (*point) return cmd_point(p_file, p_bounds, p_direction, p_tol, out, err);
    if (*falsify_cmd) return cmd_search(false, ff, fs_flags, out, err);
    if (*equality_cmd) return cmd_search(true, ef, es_flags, out, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace qcurv
