#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcurv/point_file.hpp"
#include "qcurv/report.hpp"

namespace py = pybind11;
using namespace qcurv;

namespace {

ClassTag make_tag(const std::string& name, const std::vector<int>& invariant, double theta) {
  if (name == "generic") return tag::Generic{};
  if (name == "totally-real") return tag::TotallyReal{};
  if (name == "cr") return tag::CR{invariant};
  if (name == "slant") return tag::Slant{theta};
  throw Error(Errc::invalid_input, "unknown class '" + name + "'");
}

BoundId bound_id(const std::string& name) {
  const auto id = parse_bound(name);
  if (!id) parse_bound_list(name);  // throws with the list of valid names
  return *id;
}

Convention convention(const std::string& s) {
  const auto c = parse_convention(s);
  if (!c) throw Error(Errc::invalid_input, "convention must be eq21, qp4c or tilde");
  return *c;
}

py::dict report_dict(const BoundReport& r) {
  py::dict d;
  d["bound"] = std::string(to_string(r.id));
  d["lhs"] = r.lhs;
  d["lower"] = r.lower;
  d["upper"] = r.upper;
  d["gap_lower"] = r.gap_lower;
  d["gap_upper"] = r.gap_upper;
  d["status"] = std::string(to_string(r.status));
  d["relative_violation"] = r.relative_violation();
  return d;
}

CampaignConfig make_config(std::uint64_t seed, int trials, int n_min, int n_max, int m_min, int m_max,
                           std::vector<double> c, const std::string& conv, const std::string& cls,
                           const std::string& bounds, std::vector<double> sff_scales, double tol, int threads) {
  CampaignConfig cfg;
  cfg.seed = seed;
  cfg.trials = trials;
  cfg.n_min = n_min;
  cfg.n_max = n_max;
  cfg.m_min = m_min;
  cfg.m_max = m_max;
  cfg.c_values = std::move(c);
  cfg.convention = convention(conv);
  cfg.cls = ClassTemplate::parse(cls);
  cfg.bounds = parse_bound_list(bounds);
  cfg.sff_scales = std::move(sff_scales);
  cfg.tol = tol;
  cfg.threads = threads;
  return cfg;
}

py::dict search_dict(const SearchResult& r) {
  py::dict d;
  d["bound"] = std::string(to_string(r.bound));
  d["best_objective"] = r.best_objective;
  d["best_restart"] = r.best_restart;
  d["restarts_run"] = r.restarts_run;
  d["evaluations"] = r.evaluations;
  d["seed"] = r.seed;
  d["config_hash"] = r.config_hash;
  d["witness"] = r.witness;
  d["direction"] = r.direction;
  d["direction2"] = r.direction2;
  if (r.report) d["report"] = report_dict(*r.report);
  if (r.diagnosis) d["is_quasi_umbilical"] = r.diagnosis->is_quasi_umbilical;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qcurv, m) {
  m.doc() = "Ricci and sectional curvature bounds for submanifolds of quaternionic space forms";

  static py::exception<Error> exc(m, "QcurvError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, e.what());
    }
  });

  py::class_<QuaternionStructure>(m, "QuaternionStructure")
      .def_static("standard", &QuaternionStructure::standard, py::arg("m"))
      .def_property_readonly("m", &QuaternionStructure::m)
      .def_property_readonly("dim", &QuaternionStructure::dim)
      .def_property_readonly("I", &QuaternionStructure::I)
      .def_property_readonly("J", &QuaternionStructure::J)
      .def_property_readonly("K", &QuaternionStructure::K);

  m.def("verify_relations", [](const QuaternionStructure& q, double tol) {
    return verify_relations(q, tol).max_deviation;
  }, py::arg("structure"), py::arg("tol") = 1e-12);

  py::class_<AmbientSpaceForm>(m, "AmbientSpaceForm")
      .def(py::init([](int m_, double c, const std::string& conv) {
             return AmbientSpaceForm(QuaternionStructure::standard(m_), c, convention(conv));
           }),
           py::arg("m"), py::arg("c"), py::arg("convention") = "eq21")
      .def_property_readonly("c", &AmbientSpaceForm::c)
      .def_property_readonly("dim", &AmbientSpaceForm::dim)
      .def_property_readonly("coefficient", &AmbientSpaceForm::coefficient)
      .def("sectional", [](const AmbientSpaceForm& a, const Vector& x, const Vector& y) {
        return ambient_sectional(a, x, y);
      });

  py::class_<SubmanifoldPoint>(m, "SubmanifoldPoint")
      .def(py::init([](const AmbientSpaceForm& a, const Matrix& tangent, std::optional<Matrix> normal,
                       std::vector<Matrix> h, const std::string& cls, std::vector<int> invariant, double theta) {
             return SubmanifoldPoint::from_data(a, tangent, normal.value_or(Matrix()), std::move(h),
                                                make_tag(cls, invariant, theta));
           }),
           py::arg("ambient"), py::arg("tangent"), py::arg("normal") = py::none(), py::arg("h") = std::vector<Matrix>{},
           py::arg("cls") = "generic", py::arg("invariant") = std::vector<int>{}, py::arg("theta") = M_PI / 2)
      .def_property_readonly("n", &SubmanifoldPoint::n)
      .def_property_readonly("codim", &SubmanifoldPoint::codim)
      .def_property_readonly("tangent", &SubmanifoldPoint::tangent)
      .def_property_readonly("normal", &SubmanifoldPoint::normal)
      .def_property_readonly("h", &SubmanifoldPoint::sff)
      .def_property_readonly("class_name", [](const SubmanifoldPoint& p) { return class_name(p.class_tag()); })
      .def("ricci", [](const SubmanifoldPoint& p, const Vector& x) { return ricci(p, p.tangent() * x); },
           py::arg("x"), "Ric(X) for X in tangent-frame coordinates")
      .def("sectional",
           [](const SubmanifoldPoint& p, const Vector& x, const Vector& y) {
             return sectional(p, p.tangent() * x, p.tangent() * y);
           },
           py::arg("x"), py::arg("y"))
      .def("mean_curvature_squared", [](const SubmanifoldPoint& p) { return derive(p).meanH2; })
      .def("sff_norm_squared", [](const SubmanifoldPoint& p) { return derive(p).sffNorm2; })
      .def("check_class", [](const SubmanifoldPoint& p, double tol) { return check_class(p, tol).pass; },
           py::arg("tol") = 1e-8)
      .def("to_json", [](const SubmanifoldPoint& p) { return to_json(p); });

  m.def("bound_names", [] {
    std::vector<std::string> out;
    for (const auto& b : bound_catalog()) out.emplace_back(b.name);
    return out;
  });

  m.def("evaluate",
        [](const SubmanifoldPoint& p, const std::string& bound, const Vector& x, std::optional<Vector> y,
           double rel_tol) { return report_dict(evaluate(p, bound_id(bound), x, y, rel_tol)); },
        py::arg("point"), py::arg("bound"), py::arg("x"), py::arg("y") = py::none(), py::arg("rel_tol") = 1e-9);

  m.def("chen_equality_sff", [](int n, const std::vector<double>& traces) {
    return build_sff(EqualitySpec::chen_equality(n, traces));
  }, py::arg("n"), py::arg("traces"));
  m.def("hineva_eigenvalues", &hineva_eigenvalues, py::arg("t"), py::arg("s"), py::arg("n"), py::arg("sign") = 1);
  m.def("null_space", &null_space, py::arg("point"), py::arg("tol") = 1e-9);
  m.def("diagnose", [](const SubmanifoldPoint& p) {
    const EqualityDiagnosis d = diagnose(p);
    py::dict out;
    out["is_quasi_umbilical"] = d.is_quasi_umbilical;
    out["ratio_invariant"] = d.ratio_invariant;
    out["null_space"] = d.null_space_basis;
    out["lambda_direction"] = d.lambda_direction;
    py::list reports;
    for (const auto& r : d.bound_reports) reports.append(report_dict(r));
    out["reports"] = reports;
    return out;
  });

  m.def("parse_point", [](const std::string& text) { return parse_point_document(text).point; });
  m.def("load_point", [](const std::string& path) { return load_point_file(path).point; });

  m.def("run_campaign",
        [](std::uint64_t seed, int trials, int n_min, int n_max, int m_min, int m_max, std::vector<double> c,
           const std::string& conv, const std::string& cls, const std::string& bounds, std::vector<double> sff_scales,
           double tol, int threads) {
          const CampaignResult res = run_campaign(
              make_config(seed, trials, n_min, n_max, m_min, m_max, std::move(c), conv, cls, bounds,
                          std::move(sff_scales), tol, threads));
          py::dict out;
          py::dict per;
          for (const auto& [id, s] : res.summary) {
            py::dict b;
            b["satisfied"] = s.satisfied;
            b["equality"] = s.equality;
            b["violated"] = s.violated;
            b["min_rel_gap_lower"] = s.min_rel_gap_lower;
            b["min_rel_gap_upper"] = s.min_rel_gap_upper;
            per[py::str(std::string(to_string(id)))] = b;
          }
          out["bounds"] = per;
          out["rejected"] = res.rejected;
          out["violations"] = res.violations.size();
          std::ostringstream csv;
          write_csv(csv, res.rows);
          out["csv"] = csv.str();
          return out;
        },
        py::arg("seed") = 1, py::arg("trials") = 100, py::arg("n_min") = 2, py::arg("n_max") = 5,
        py::arg("m_min") = 1, py::arg("m_max") = 0, py::arg("c") = std::vector<double>{1.0},
        py::arg("convention") = "eq21", py::arg("cls") = "generic", py::arg("bounds") = "chen_ricci.general",
        py::arg("sff_scales") = std::vector<double>{1.0}, py::arg("tol") = 1e-9, py::arg("threads") = 1);

  for (const char* name : {"falsify", "approach_equality"}) {
    const bool eq = std::string(name) == "approach_equality";
    m.def(name,
          [eq](const std::string& bound, std::uint64_t seed, int restarts, int steps, int n_min, int n_max,
               std::vector<double> c, const std::string& conv, const std::string& cls) {
            const CampaignConfig cfg = make_config(seed, 1, n_min, n_max, 1, 0, std::move(c), conv, cls, bound,
                                                   {1.0}, 1e-9, 1);
            const SearchBudget budget{restarts, steps};
            const BoundId id = bound_id(bound);
            return search_dict(eq ? approach_equality(cfg, id, budget) : falsify(cfg, id, budget));
          },
          py::arg("bound"), py::arg("seed") = 1, py::arg("restarts") = 20, py::arg("steps") = 200,
          py::arg("n_min") = 2, py::arg("n_max") = 5, py::arg("c") = std::vector<double>{1.0},
          py::arg("convention") = "eq21", py::arg("cls") = "generic");
  }
}
