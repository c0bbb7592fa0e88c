#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "qcurv/submanifold.hpp"

namespace qcurv {

enum class BoundId {
  A1SectionalLower,
  A2SectionalUpper,
  A3RicciUpper,
  A4RicciLower,
  ChenRicciGeneral,
  HinevaSqrtGeneral,
  VermaPrintedLower,
  QProjUpper,
  QProjHinevaLower,
  QProjTwosided,
  CRUpperDperp,
  CRUpperD,
  CRHinevaDperp,
  CRHinevaD,
  CRTwosidedDperp,
  CRTwosidedD,
  SlantUpper,
  SlantHinevaLower,
  SlantTwosided,
};

/// Tangent directions a Ricci bound may be evaluated on.
enum class Distribution { Full, D, DPerp };

struct BoundInfo {
  BoundId id;
  std::string_view name;  // stable identifier used in CLI flags and CSV output
  bool sectional;         // K(pi) bound rather than Ric(X)
  bool has_lower;
  bool has_upper;
  Distribution distribution;
  bool as_printed_variant;      // reproduced verbatim, not known to hold
  bool homogeneity_normalized;  // radical taken over the full product
};

const std::vector<BoundInfo>& bound_catalog();
const BoundInfo& info(BoundId id);
std::string_view to_string(BoundId id);
std::optional<BoundId> parse_bound(std::string_view name);

/// Expands a comma-separated list of identifiers and `prefix.*` globs. Throws
/// Errc::unknown_bound with the list of valid identifiers on a bad name.
std::vector<BoundId> parse_bound_list(std::string_view list);

enum class Status { satisfied, equality, violated };
std::string_view to_string(Status s) noexcept;

struct BaseTerms {
  double lower = 0.0;
  double upper = 0.0;
};

/// Curvature-constant term of the named bound at unit tangent direction
/// `x_coords` (tangent-frame coordinates). The two sides differ only for
/// slant.twosided, whose printed lower side carries no cos^2 term. Sectional
/// bounds are not covered here.
BaseTerms base_ambient_term(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                            const Vector& x_coords, BoundId id);

/// base + ((n-1)/n)(2n|H|^2 - |h|^2 - (n-2) sqrt(n|H|^2 (|h|^2 - n|H|^2) / (n-1))).
double hineva_lower_sqrt(double base, const DerivedInvariants& inv, int n);

/// base + (n^2/4)|H|^2.
double chen_ricci_upper(double base, const DerivedInvariants& inv, int n);

/// base + ((n-1)/n)(2n|H|^2 - |h|^2 - (n-2)(n-1)|H|^2), reproduced as printed.
double verma_printed_lower(double base, const DerivedInvariants& inv, int n);

struct SectionalBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Lower/upper sectional bounds for the plane spanned by the orthonormal tangent
/// pair given in tangent-frame coordinates.
SectionalBounds sectional_bounds_A(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                                   const Vector& x_coords, const Vector& y_coords);

double a4_ricci_lower(const SubmanifoldPoint& p, const DerivedInvariants& inv,
                      const Vector& x_coords);

struct BoundReport {
  BoundId id{};
  Vector direction;                 // tangent-frame coordinates of X
  std::optional<Vector> direction2; // Y for sectional bounds
  double lhs = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> gap_lower;  // lhs - lower
  std::optional<double> gap_upper;  // upper - lhs
  double tol = 0.0;                 // absolute tolerance used for the status
  Status status = Status::satisfied;
  bool equal_lower = false;
  bool equal_upper = false;

  /// max(-gap_lower, -gap_upper) divided by max(1, |lhs|, |lower|, |upper|).
  double relative_violation() const;
  double scale() const;
};

/// Evaluates one bound at unit tangent direction X (and Y for sectional bounds),
/// both given in tangent-frame coordinates. The status tolerance is
/// rel_tol * max(1, |lhs|, |lower|, |upper|).
BoundReport evaluate(const SubmanifoldPoint& p, const DerivedInvariants& inv, BoundId id,
                     const Vector& x_coords, const std::optional<Vector>& y_coords = std::nullopt,
                     double rel_tol = 1e-9);

BoundReport evaluate(const SubmanifoldPoint& p, BoundId id, const Vector& x_coords,
                     const std::optional<Vector>& y_coords = std::nullopt,
                     double rel_tol = 1e-9);

/// Indices of the tangent frame spanning the distribution a bound is stated on,
/// or nullopt when the point's class does not support the bound.
std::optional<std::vector<int>> admissible_indices(const SubmanifoldPoint& p, BoundId id);

}  // namespace qcurv
