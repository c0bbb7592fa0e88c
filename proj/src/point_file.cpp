#include "qcurv/point_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qcurv {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(Errc::parse_error, "field '" + field + "': " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

// Rows of equal length; returns rows x cols.
Matrix matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.is_array()) fail(rf, "expected an array of numbers");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      if (cols == 0) fail(rf, "empty row");
      out.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      fail(rf, "row length " + std::to_string(row.size()) + ", expected " + std::to_string(cols));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      out(r, c) = number(row[static_cast<std::size_t>(c)], rf + "[" + std::to_string(c) + "]");
    }
  }
  return out;
}

ClassTag parse_class(const json& j, int n) {
  const std::string field = "class";
  std::string name;
  const json* params = nullptr;
  if (j.is_string()) {
    name = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("tag") || !j["tag"].is_string()) fail("class.tag", "expected a string");
    name = j["tag"].get<std::string>();
    params = &j;
  } else {
    fail(field, "expected a string or an object with \"tag\"");
  }
  if (name == "generic") return tag::Generic{};
  if (name == "totally-real" || name == "totally_real") return tag::TotallyReal{};
  if (name == "cr") {
    tag::CR cr;
    if (params && params->contains("invariant_indices")) {
      const json& idx = (*params)["invariant_indices"];
      if (!idx.is_array()) fail("class.invariant_indices", "expected an array of 1-based indices");
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const std::string f = "class.invariant_indices[" + std::to_string(k) + "]";
        const int i = integer(idx[k], f);
        if (i < 1 || i > n) fail(f, "index must lie in 1.." + std::to_string(n));
        cr.invariant.push_back(i - 1);
      }
    }
    return cr;
  }
  if (name == "slant") {
    if (!params || !params->contains("theta")) fail("class.theta", "slant class needs theta (radians)");
    return tag::Slant{number((*params)["theta"], "class.theta")};
  }
  fail("class.tag", "unknown class '" + name + "' (generic, totally-real, cr, slant)");
}

EqualitySpec parse_equality(const json& j) {
  if (!j.is_object()) fail("equality", "expected an object");
  EqualitySpec spec;
  std::string kind = "quasi-umbilical";
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) fail("equality.kind", "expected a string");
    kind = j["kind"].get<std::string>();
  }
  const auto k = parse_equality_kind(kind);
  if (!k) fail("equality.kind", "unknown kind '" + kind + "' (quasi-umbilical, chen, umbilical)");
  if (!j.contains("n")) fail("equality.n", "missing");
  spec.n = integer(j["n"], "equality.n");
  spec.kind = *k;
  if (!j.contains("pairs") || !j["pairs"].is_array()) fail("equality.pairs", "expected an array of [lambda, mu]");
  for (std::size_t a = 0; a < j["pairs"].size(); ++a) {
    const json& pr = j["pairs"][a];
    const std::string f = "equality.pairs[" + std::to_string(a) + "]";
    if (!pr.is_array() || pr.size() != 2) fail(f, "expected [lambda, mu]");
    spec.pairs.emplace_back(number(pr[0], f + "[0]"), number(pr[1], f + "[1]"));
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    fail("equality", e.what());
  }
  return spec;
}

WitnessInfo parse_witness(const json& j, int n) {
  if (!j.is_object()) fail("witness", "expected an object");
  WitnessInfo w;
  if (!j.contains("bound") || !j["bound"].is_string()) fail("witness.bound", "expected a string");
  const auto b = parse_bound(j["bound"].get<std::string>());
  if (!b) fail("witness.bound", "unknown bound '" + j["bound"].get<std::string>() + "'");
  w.bound = *b;
  auto vec = [&](const char* key) {
    const std::string f = std::string("witness.") + key;
    const Matrix m = matrix(json::array({j[key]}), f);
    if (m.cols() != n) fail(f, "expected " + std::to_string(n) + " tangent coordinates");
    return Vector(m.row(0).transpose());
  };
  if (!j.contains("direction")) fail("witness.direction", "missing");
  w.direction = vec("direction");
  if (j.contains("direction2") && !j["direction2"].is_null()) w.direction2 = vec("direction2");
  if (j.contains("objective")) w.objective = number(j["objective"], "witness.objective");
  if (j.contains("seed")) w.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("config_hash")) w.config_hash = j["config_hash"].get<std::uint64_t>();
  return w;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

json rows_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

PointDocument parse_point_document(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, "JSON syntax error at line " + std::to_string(line_of(text, e.byte)) +
                                       ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse_error, "point document must be a JSON object");

  static const std::set<std::string> known{"m",     "c",     "convention", "tangent_frame", "normal_frame",
                                           "h",     "sigma", "class",      "equality",      "witness",
                                           "comment"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) fail(key, "unknown field");
  }
  for (const char* key : {"m", "c", "tangent_frame"}) {
    if (!j.contains(key)) fail(key, "missing");
  }
  const int m = integer(j["m"], "m");
  if (m < 1) fail("m", "must be >= 1");
  const double c = number(j["c"], "c");
  Convention conv = Convention::Eq21;
  if (j.contains("convention")) {
    if (!j["convention"].is_string()) fail("convention", "expected a string");
    const auto parsed = parse_convention(j["convention"].get<std::string>());
    if (!parsed) fail("convention", "expected one of eq21, qp4c, tilde");
    conv = *parsed;
  }

  const Matrix tangent_rows = matrix(j["tangent_frame"], "tangent_frame");
  if (tangent_rows.cols() != 4 * m) {
    fail("tangent_frame", "rows must have 4m = " + std::to_string(4 * m) + " entries");
  }
  const int n = static_cast<int>(tangent_rows.rows());
  if (n < 2 || n >= 4 * m) fail("tangent_frame", "need 2 <= n < 4m rows");
  Matrix normal;
  if (j.contains("normal_frame") && !j["normal_frame"].is_null()) {
    const Matrix rows = matrix(j["normal_frame"], "normal_frame");
    if (rows.cols() != 4 * m) fail("normal_frame", "rows must have 4m = " + std::to_string(4 * m) + " entries");
    if (rows.rows() != 4 * m - n) fail("normal_frame", "expected 4m - n = " + std::to_string(4 * m - n) + " rows");
    normal = rows.transpose();
  }

  std::optional<EqualitySpec> equality;
  if (j.contains("equality")) equality = parse_equality(j["equality"]);

  if (j.contains("h") && j.contains("sigma")) fail("sigma", "give either h or sigma, not both");
  const char* hkey = j.contains("h") ? "h" : (j.contains("sigma") ? "sigma" : nullptr);
  std::vector<Matrix> sff;
  if (hkey) {
    const json& hj = j[hkey];
    if (!hj.is_array()) fail(hkey, "expected an array of n x n matrices");
    if (static_cast<int>(hj.size()) > 4 * m - n) {
      fail(hkey, "at most 4m - n = " + std::to_string(4 * m - n) + " matrices");
    }
    for (std::size_t a = 0; a < hj.size(); ++a) {
      const std::string f = std::string(hkey) + "[" + std::to_string(a) + "]";
      Matrix h = matrix(hj[a], f);
      if (h.rows() != n || h.cols() != n) fail(f, "expected an " + std::to_string(n) + " x " + std::to_string(n) + " matrix");
      const double asym = max_abs(h - h.transpose());
      if (asym > 1e-12) {
        std::ostringstream os;
        os << "matrix is not symmetric (max |h_ij - h_ji| = " << asym << ")";
        fail(f, os.str());
      }
      sff.push_back(std::move(h));
    }
  } else if (equality) {
    if (equality->n != n) fail("equality.n", "does not match the tangent frame (n = " + std::to_string(n) + ")");
    if (static_cast<int>(equality->pairs.size()) > 4 * m - n) fail("equality.pairs", "more pairs than normal directions");
    sff = build_sff(*equality);
  } else {
    fail("h", "missing (give h, sigma or equality)");
  }

  ClassTag tag = tag::Generic{};
  if (j.contains("class")) tag = parse_class(j["class"], n);

  std::optional<SubmanifoldPoint> point;
  try {
    point = SubmanifoldPoint::from_data(AmbientSpaceForm(QuaternionStructure::standard(m), c, conv),
                                            tangent_rows.transpose(), normal, std::move(sff), std::move(tag));
  } catch (const Error& e) {
    const std::string what = e.what();
    const std::string field = what.find("normal") != std::string::npos ? "normal_frame"
                              : what.find("CR") != std::string::npos || what.find("slant") != std::string::npos
                                  ? "class"
                              : what.find("h") == 0 ? std::string(hkey ? hkey : "h")
                                                    : "tangent_frame";
    fail(field, what);
  }
  std::optional<WitnessInfo> witness;
  if (j.contains("witness")) witness = parse_witness(j["witness"], n);
  return PointDocument{std::move(*point), std::move(equality), std::move(witness)};
}

PointDocument load_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open point file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_point_document(ss.str());
}

std::string to_json(const SubmanifoldPoint& p, const std::optional<WitnessInfo>& witness) {
  json j;
  j["m"] = p.ambient().m();
  j["c"] = p.ambient().c();
  j["convention"] = std::string(to_string(p.ambient().convention()));
  j["tangent_frame"] = rows_json(p.tangent().transpose());
  j["normal_frame"] = rows_json(p.normal().transpose());
  json h = json::array();
  for (const Matrix& m : p.sff()) h.push_back(rows_json(m));
  j["h"] = std::move(h);
  json cls;
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, tag::Generic>) {
          cls = {{"tag", "generic"}};
        } else if constexpr (std::is_same_v<T, tag::TotallyReal>) {
          cls = {{"tag", "totally-real"}};
        } else if constexpr (std::is_same_v<T, tag::CR>) {
          json idx = json::array();
          for (int i : t.invariant) idx.push_back(i + 1);
          cls = {{"tag", "cr"}, {"invariant_indices", idx}};
        } else {
          cls = {{"tag", "slant"}, {"theta", t.theta}};
        }
      },
      p.class_tag());
  j["class"] = std::move(cls);
  if (witness) {
    json w;
    w["bound"] = std::string(to_string(witness->bound));
    w["direction"] = vector_json(witness->direction);
    if (witness->direction2) w["direction2"] = vector_json(*witness->direction2);
    w["objective"] = witness->objective;
    w["seed"] = witness->seed;
    w["config_hash"] = witness->config_hash;
    j["witness"] = std::move(w);
  }
  return j.dump(2) + "\n";
}

void save_point_file(const std::string& path, const SubmanifoldPoint& p,
                     const std::optional<WitnessInfo>& witness) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::invalid_input, "cannot write '" + path + "'");
  out << to_json(p, witness);
}

}  // namespace qcurv
