#include "qcurv/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace qcurv {

namespace {

constexpr double kRadicandTol = 1e-12;
constexpr double kDistributionTol = 1e-8;
constexpr double kUnitTol = 1e-10;

using D = Distribution;

const std::vector<BoundInfo> kCatalog = {
    {BoundId::A1SectionalLower, "a1.sectional_lower", true, true, false, D::Full, false, false},
    {BoundId::A2SectionalUpper, "a2.sectional_upper", true, false, true, D::Full, false, true},
    {BoundId::A3RicciUpper, "a3.ricci_upper", false, false, true, D::Full, false, false},
    {BoundId::A4RicciLower, "a4.ricci_lower", false, true, false, D::Full, false, true},
    {BoundId::ChenRicciGeneral, "chen_ricci.general", false, false, true, D::Full, false, false},
    {BoundId::HinevaSqrtGeneral, "hineva_sqrt.general", false, true, false, D::Full, false, false},
    {BoundId::VermaPrintedLower, "verma.printed_lower", false, true, false, D::Full, true, false},
    {BoundId::QProjUpper, "qproj.upper", false, false, true, D::Full, false, false},
    {BoundId::QProjHinevaLower, "qproj.hineva_lower", false, true, false, D::Full, false, false},
    {BoundId::QProjTwosided, "qproj.twosided", false, true, true, D::Full, false, false},
    {BoundId::CRUpperDperp, "cr.upper.Dperp", false, false, true, D::DPerp, false, false},
    {BoundId::CRUpperD, "cr.upper.D", false, false, true, D::D, false, false},
    {BoundId::CRHinevaDperp, "cr.hineva.Dperp", false, true, false, D::DPerp, false, false},
    {BoundId::CRHinevaD, "cr.hineva.D", false, true, false, D::D, false, false},
    {BoundId::CRTwosidedDperp, "cr.twosided.Dperp", false, true, true, D::DPerp, false, false},
    {BoundId::CRTwosidedD, "cr.twosided.D", false, true, true, D::D, false, false},
    {BoundId::SlantUpper, "slant.upper", false, false, true, D::Full, false, false},
    {BoundId::SlantHinevaLower, "slant.hineva_lower", false, true, false, D::Full, false, false},
    {BoundId::SlantTwosided, "slant.twosided", false, true, true, D::Full, false, false},
};

bool is_cr(BoundId id) {
  return id >= BoundId::CRUpperDperp && id <= BoundId::CRTwosidedD;
}
bool is_slant(BoundId id) {
  return id >= BoundId::SlantUpper && id <= BoundId::SlantTwosided;
}
bool is_qproj(BoundId id) {
  return id >= BoundId::QProjUpper && id <= BoundId::QProjTwosided;
}

std::string valid_names() {
  std::string s;
  for (const auto& b : kCatalog) {
    if (!s.empty()) s += ", ";
    s += b.name;
  }
  return s;
}

double clamped_radicand(double value, const char* what) {
  if (value < -kRadicandTol) {
    throw Error(Errc::internal_consistency,
                std::string(what) + ": |h|^2 < n|H|^2 (corrupted invariants)");
  }
  return std::max(value, 0.0);
}

void require_unit(const Vector& v, int n, const char* name) {
  if (v.size() != n) {
    throw Error(Errc::invalid_input, std::string(name) + ": expected " + std::to_string(n) +
                                         " tangent coordinates");
  }
  if (std::abs(v.norm() - 1.0) > kUnitTol) {
    throw Error(Errc::invalid_input, std::string(name) + " must be a unit vector");
  }
}

double slant_theta(const SubmanifoldPoint& p) {
  if (const auto* s = std::get_if<tag::Slant>(&p.class_tag())) return s->theta;
  return M_PI / 2;  // totally real
}

}  // namespace

const std::vector<BoundInfo>& bound_catalog() { return kCatalog; }

const BoundInfo& info(BoundId id) { return kCatalog.at(static_cast<std::size_t>(id)); }

std::string_view to_string(BoundId id) { return info(id).name; }

std::optional<BoundId> parse_bound(std::string_view name) {
  for (const auto& b : kCatalog) {
    if (b.name == name) return b.id;
  }
  // Short aliases for the four sectional/Ricci bounds of the general family.
  if (name == "A1") return BoundId::A1SectionalLower;
  if (name == "A2") return BoundId::A2SectionalUpper;
  if (name == "A3") return BoundId::A3RicciUpper;
  if (name == "A4") return BoundId::A4RicciLower;
  return std::nullopt;
}

std::vector<BoundId> parse_bound_list(std::string_view list) {
  std::vector<BoundId> out;
  auto push = [&out](BoundId id) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  };
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const auto comma = list.find(',', pos);
    std::string_view item = list.substr(pos, comma == std::string_view::npos ? list.size() - pos
                                                                               : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      if (item == "*" || item == "all") {
        for (const auto& b : kCatalog) push(b.id);
      } else if (item.size() >= 2 && item.substr(item.size() - 2) == ".*") {
        const auto prefix = item.substr(0, item.size() - 1);
        bool any = false;
        for (const auto& b : kCatalog) {
          if (b.name.substr(0, prefix.size()) == prefix) {
            push(b.id);
            any = true;
          }
        }
        if (!any) {
          throw Error(Errc::unknown_bound, "no bound matches '" + std::string(item) +
                                               "'; valid identifiers: " + valid_names());
        }
      } else if (auto id = parse_bound(item)) {
        push(*id);
      } else {
        throw Error(Errc::unknown_bound, "unknown bound '" + std::string(item) +
                                             "'; valid identifiers: " + valid_names());
      }
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error(Errc::unknown_bound, "empty bound list; valid identifiers: " + valid_names());
  return out;
}

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::satisfied: return "satisfied";
    case Status::equality: return "equality";
    case Status::violated: return "violated";
  }
  return "satisfied";
}

std::optional<std::vector<int>> admissible_indices(const SubmanifoldPoint& p, BoundId id) {
  const int n = p.n();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const auto& tag = p.class_tag();
  if (is_slant(id)) {
    if (std::holds_alternative<tag::Slant>(tag) || std::holds_alternative<tag::TotallyReal>(tag)) {
      return all;
    }
    return std::nullopt;
  }
  if (is_cr(id)) {
    const bool want_d = info(id).distribution == D::D;
    if (std::holds_alternative<tag::TotallyReal>(tag)) {
      // A totally real submanifold is CR with D = 0.
      return want_d ? std::nullopt : std::optional<std::vector<int>>(all);
    }
    const auto* cr = std::get_if<tag::CR>(&tag);
    if (cr == nullptr) return std::nullopt;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      const bool in_d = std::find(cr->invariant.begin(), cr->invariant.end(), i) != cr->invariant.end();
      if (in_d == want_d) idx.push_back(i);
    }
    if (idx.empty()) return std::nullopt;
    return idx;
  }
  return all;
}

BaseTerms base_ambient_term(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                            const Vector& x_coords, BoundId id) {
  const BoundInfo& bi = info(id);
  if (bi.sectional) {
    throw Error(Errc::invalid_input, "base_ambient_term: sectional bounds use ambient_sectional");
  }
  require_unit(x_coords, p.n(), "X");
  const auto idx = admissible_indices(p, id);
  if (!idx) {
    throw Error(Errc::wrong_distribution, std::string(bi.name) + " does not apply to a " +
                                              class_name(p.class_tag()) + " point");
  }
  if (static_cast<int>(idx->size()) != p.n()) {
    Vector outside = x_coords;
    for (int i : *idx) outside[i] = 0.0;
    if (outside.norm() > kDistributionTol) {
      throw Error(Errc::wrong_distribution,
                  std::string(bi.name) + ": X is not in the required distribution");
    }
  }

  const double n = p.n();
  const double c = p.ambient().coefficient();  // QP^m(4c) constant
  const double ct = p.ambient().tilde_c();     // M~(c) constant
  if (is_qproj(id)) {
    const double v = (n - 1) * c + 1.5 * c * (inv.pNorm2[0] + inv.pNorm2[1] + inv.pNorm2[2]);
    return {v, v};
  }
  if (is_cr(id)) {
    const double v = bi.distribution == D::D ? (n + 8) * ct / 4 : (n - 1) * ct / 4;
    return {v, v};
  }
  if (is_slant(id)) {
    const double cs = std::cos(slant_theta(p));
    const double with_cos = (n - 1) * ct / 4 + 3 * ct / 8 * cs * cs;
    if (id == BoundId::SlantTwosided) return {(n - 1) * ct / 4, with_cos};
    return {with_cos, with_cos};
  }
  const double ric = ambient_ricci_tangent(p.ambient(), p.tangent(), p.tangent() * x_coords);
  return {ric, ric};
}

double hineva_lower_sqrt(double base, const DerivedInvariants& inv, int n) {
  const double nn = n;
  const double rad = clamped_radicand(inv.umbilicity_defect, "hineva_lower_sqrt");
  const double root = std::sqrt(nn * inv.meanH2 * rad / (nn - 1));
  return base + (nn - 1) / nn * (2 * nn * inv.meanH2 - inv.sffNorm2 - (nn - 2) * root);
}

double chen_ricci_upper(double base, const DerivedInvariants& inv, int n) {
  const double nn = n;
  return base + nn * nn / 4 * inv.meanH2;
}

double verma_printed_lower(double base, const DerivedInvariants& inv, int n) {
  const double nn = n;
  return base +
         (nn - 1) / nn * (2 * nn * inv.meanH2 - inv.sffNorm2 - (nn - 2) * (nn - 1) * inv.meanH2);
}

SectionalBounds sectional_bounds_A(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                                   const Vector& x_coords, const Vector& y_coords) {
  require_unit(x_coords, p.n(), "X");
  require_unit(y_coords, p.n(), "Y");
  if (std::abs(x_coords.dot(y_coords)) > kUnitTol) {
    throw Error(Errc::invalid_input, "X and Y must be orthogonal");
  }
  const double n = p.n();
  const double kbar =
      ambient_sectional(p.ambient(), p.tangent() * x_coords, p.tangent() * y_coords);
  const double rad = clamped_radicand(inv.umbilicity_defect, "sectional_bounds_A");
  SectionalBounds b;
  b.lower = kbar + n * n * inv.meanH2 / (2 * (n - 1)) - inv.sffNorm2 / 2;
  b.upper = kbar + (4 - n) / 2 * inv.meanH2 + (n - 2) / (2 * n) * inv.sffNorm2 +
            std::sqrt(2 * (n - 2) / n * inv.meanH2 * rad);
  return b;
}

double a4_ricci_lower(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                      const Vector& x_coords) {
  require_unit(x_coords, p.n(), "X");
  const double n = p.n();
  const double ric_bar = ambient_ricci_tangent(p.ambient(), p.tangent(), p.tangent() * x_coords);
  const double rad = clamped_radicand(inv.umbilicity_defect, "a4_ricci_lower");
  return ric_bar + 2 * (n - 1) * inv.meanH2 - (n - 1) / n * inv.sffNorm2 -
         n * (n - 2) / (n - 1) * std::sqrt((n - 1) / n * inv.meanH2 * rad);
}

double BoundReport::scale() const {
  double s = std::max(1.0, std::abs(lhs));
  if (lower) s = std::max(s, std::abs(*lower));
  if (upper) s = std::max(s, std::abs(*upper));
  return s;
}

double BoundReport::relative_violation() const {
  double v = -std::numeric_limits<double>::infinity();
  if (gap_lower) v = std::max(v, -*gap_lower);
  if (gap_upper) v = std::max(v, -*gap_upper);
  return v / scale();
}

BoundReport evaluate(const SubmanifoldPoint& p, const DerivedInvariants& inv, BoundId id,
                     const Vector& x_coords, const std::optional<Vector>& y_coords,
                     double rel_tol) {
  const BoundInfo& bi = info(id);
  const int n = p.n();
  BoundReport r;
  r.id = id;
  r.direction = x_coords;

  if (bi.sectional) {
    if (!y_coords) throw Error(Errc::invalid_input, std::string(bi.name) + " needs a plane (X, Y)");
    r.direction2 = *y_coords;
    const SectionalBounds sb = sectional_bounds_A(p, inv, x_coords, *y_coords);
    r.lhs = sectional(p, p.tangent() * x_coords, p.tangent() * *y_coords);
    if (bi.has_lower) r.lower = sb.lower;
    if (bi.has_upper) r.upper = sb.upper;
  } else {
    const BaseTerms base = base_ambient_term(p, inv, x_coords, id);
    r.lhs = ricci(p, p.tangent() * x_coords);
    switch (id) {
      case BoundId::A3RicciUpper:
      case BoundId::ChenRicciGeneral:
      case BoundId::QProjUpper:
      case BoundId::CRUpperDperp:
      case BoundId::CRUpperD:
      case BoundId::SlantUpper:
        r.upper = chen_ricci_upper(base.upper, inv, n);
        break;
      case BoundId::A4RicciLower:
        r.lower = a4_ricci_lower(p, inv, x_coords);
        break;
      case BoundId::VermaPrintedLower:
        r.lower = verma_printed_lower(base.lower, inv, n);
        break;
      case BoundId::HinevaSqrtGeneral:
      case BoundId::QProjHinevaLower:
      case BoundId::CRHinevaDperp:
      case BoundId::CRHinevaD:
      case BoundId::SlantHinevaLower:
        r.lower = hineva_lower_sqrt(base.lower, inv, n);
        break;
      case BoundId::QProjTwosided:
      case BoundId::CRTwosidedDperp:
      case BoundId::CRTwosidedD:
      case BoundId::SlantTwosided:
        r.lower = hineva_lower_sqrt(base.lower, inv, n);
        r.upper = chen_ricci_upper(base.upper, inv, n);
        break;
      default:
        throw Error(Errc::unknown_bound, "unhandled bound");
    }
  }

  if (r.lower) r.gap_lower = r.lhs - *r.lower;
  if (r.upper) r.gap_upper = *r.upper - r.lhs;
  r.tol = rel_tol * r.scale();
  const bool viol = (r.gap_lower && *r.gap_lower < -r.tol) || (r.gap_upper && *r.gap_upper < -r.tol);
  r.equal_lower = r.gap_lower && std::abs(*r.gap_lower) <= r.tol;
  r.equal_upper = r.gap_upper && std::abs(*r.gap_upper) <= r.tol;
  r.status = viol ? Status::violated
                  : (r.equal_lower || r.equal_upper ? Status::equality : Status::satisfied);
  return r;
}

BoundReport evaluate(const SubmanifoldPoint& p, BoundId id, const Vector& x_coords,
                     const std::optional<Vector>& y_coords, double rel_tol) {
  return evaluate(p, derive(p), id, x_coords, y_coords, rel_tol);
}

}  // namespace qcurv
