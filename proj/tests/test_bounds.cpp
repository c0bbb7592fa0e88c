#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace qcurv;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qcurv::Error thrown";
  return Errc::internal_consistency;
}

}  // namespace

TEST(Catalog, NamesAreUniqueAndParse) {
  std::set<std::string_view> names;
  for (const BoundInfo& b : bound_catalog()) {
    EXPECT_TRUE(names.insert(b.name).second) << b.name;
    EXPECT_EQ(parse_bound(b.name), b.id);
    EXPECT_EQ(to_string(b.id), b.name);
    EXPECT_TRUE(b.has_lower || b.has_upper);
  }
  EXPECT_EQ(parse_bound("A2"), BoundId::A2SectionalUpper);
  EXPECT_FALSE(parse_bound("qproj.lower"));
}

TEST(Catalog, ListsAndGlobs) {
  EXPECT_EQ(parse_bound_list("cr.*").size(), 6u);
  EXPECT_EQ(parse_bound_list("*").size(), bound_catalog().size());
  const auto l = parse_bound_list(" qproj.upper , qproj.upper,A1");
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[1], BoundId::A1SectionalLower);
  try {
    parse_bound_list("qproj.upper,nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unknown_bound);
    EXPECT_NE(std::string(e.what()).find("slant.twosided"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_bound_list("zzz.*"); }), Errc::unknown_bound);
  EXPECT_EQ(code_of([] { parse_bound_list(""); }), Errc::unknown_bound);
}

TEST(Bounds, TwoDimensionalClosedForm) {
  // Ric(e1) = c + lambda mu, and the square-root lower bound is attained.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 100; ++t) {
    const double l = u(rng), m = u(rng);
    const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {diag({l, m})});
    const BoundReport r = evaluate(p, BoundId::QProjHinevaLower, Vector::Unit(2, 0));
    EXPECT_NEAR(r.lhs, 1.0 + l * m, 1e-12);
    EXPECT_NEAR(*r.gap_lower, 0.0, 1e-10);
    EXPECT_NE(r.status, Status::violated);
  }
}

TEST(Bounds, GoldenPointValues) {
  const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {diag({1, 2})});
  const BoundReport r = evaluate(p, BoundId::QProjHinevaLower, Vector::Unit(2, 0));
  EXPECT_DOUBLE_EQ(r.lhs, 3.0);
  EXPECT_DOUBLE_EQ(*r.lower, 3.0);
  EXPECT_EQ(r.status, Status::equality);
}

TEST(Bounds, FrozenThreeDimensionalValues) {
  // h = diag(2, 1, 1), c = 1, totally real in QP^3: base 2, |H|^2 = 16/9, |h|^2 = 6.
  const SubmanifoldPoint p = test_support::totally_real_axes(3, 3, 1.0, {diag({2, 1, 1})});
  const Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
  const BoundReport up = evaluate(p, BoundId::QProjUpper, e1);
  EXPECT_NEAR(up.lhs, 6.0, 1e-13);
  EXPECT_NEAR(*up.upper, 6.0, 1e-13);
  EXPECT_EQ(up.status, Status::equality);
  const BoundReport lo = evaluate(p, BoundId::QProjHinevaLower, e1);
  EXPECT_NEAR(*lo.lower, 2.0 + 20.0 / 9.0, 1e-13);
  const BoundReport ve = evaluate(p, BoundId::VermaPrintedLower, e1);
  EXPECT_NEAR(*ve.lower, 2.0 + 20.0 / 27.0, 1e-13);
  EXPECT_NEAR(evaluate(p, BoundId::ChenRicciGeneral, e2).lhs, 5.0, 1e-13);
}

TEST(Bounds, SquareRootLowerBoundAttainedAtMinusRoot) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 20; ++t) {
      const double l = u(rng), m = u(rng);
      Vector d = Vector::Constant(n, m);
      d[0] = l;
      const double tr = d.sum(), s = d.squaredNorm();
      // With the moments fixed, lambda (n-1) mu is smallest for the root of sign -sign(t).
      const auto [lm, mm] = hineva_eigenvalues(tr, s, n, tr >= 0 ? -1 : +1);
      Vector d2 = Vector::Constant(n, mm);
      d2[0] = lm;
      const SubmanifoldPoint p = test_support::totally_real_axes(n, n, 1.0, {Matrix(d2.asDiagonal())});
      const BoundReport r = evaluate(p, BoundId::HinevaSqrtGeneral, Vector::Unit(n, 0));
      EXPECT_NEAR(*r.gap_lower, 0.0, 1e-9 * r.scale()) << "n=" << n;
    }
  }
}

TEST(Bounds, AmbientBasesMatchExactRicciForCR) {
  std::mt19937_64 rng(15);
  const QuaternionStructure q = QuaternionStructure::standard(2);
  const AmbientSpaceForm a(q, 4.0, Convention::Tilde);
  const FrameSample fs = sample_frame(ClassTemplate::parse("cr:1"), 5, 1, q, rng);
  ASSERT_TRUE(fs.feasible) << fs.reason;
  const SubmanifoldPoint p(a, fs.tangent, fs.normal, {}, fs.tag);
  const DerivedInvariants inv = derive(p);
  const Vector xd = Vector::Unit(5, 0), xp = Vector::Unit(5, 4);
  EXPECT_NEAR(base_ambient_term(p, inv, xd, BoundId::CRUpperD).upper, 13.0, 1e-12);
  EXPECT_NEAR(base_ambient_term(p, inv, xp, BoundId::CRUpperDperp).upper, 4.0, 1e-12);
  EXPECT_NEAR(ambient_ricci_tangent(a, p.tangent(), p.tangent() * xd), 13.0, 1e-12);
  EXPECT_NEAR(ambient_ricci_tangent(a, p.tangent(), p.tangent() * xp), 4.0, 1e-12);
  EXPECT_EQ(code_of([&] { base_ambient_term(p, inv, xp, BoundId::CRUpperD); }), Errc::wrong_distribution);
  EXPECT_EQ(code_of([&] { evaluate(p, BoundId::CRHinevaDperp, xd); }), Errc::wrong_distribution);
}

TEST(Bounds, QProjBaseIsExactForTotallyReal) {
  std::mt19937_64 rng(16);
  const QuaternionStructure q = QuaternionStructure::standard(4);
  for (int n = 2; n <= 4; ++n) {
    const FrameSample fs = sample_frame(ClassTemplate::parse("totally-real"), n, 0, q, rng);
    const AmbientSpaceForm a(q, -0.7);
    const SubmanifoldPoint p(a, fs.tangent, fs.normal, {}, fs.tag);
    const Vector u = test_support::random_unit(rng, n);
    EXPECT_NEAR(base_ambient_term(p, derive(p), u, BoundId::QProjUpper).upper,
                ambient_ricci_tangent(a, p.tangent(), p.tangent() * u), 1e-12);
  }
}

TEST(Bounds, SlantBaseAgainstExactAmbientRicci) {
  std::mt19937_64 rng(17);
  const QuaternionStructure q = QuaternionStructure::standard(2);
  const AmbientSpaceForm a(q, 4.0, Convention::Tilde);  // c~ = 4
  const double theta = 1.0, c2 = std::cos(theta) * std::cos(theta);
  const FrameSample fs = sample_frame(ClassTemplate::parse("slant:1.0"), 2, 0, q, rng);
  ASSERT_TRUE(fs.feasible) << fs.reason;
  const SubmanifoldPoint p(a, fs.tangent, fs.normal, {}, fs.tag);
  const Vector u = test_support::random_unit(rng, 2);
  // Exact: (n-1) c~/4 + (9 c~/4) cos^2; the catalogued base carries (3 c~/8) cos^2.
  EXPECT_NEAR(ambient_ricci_tangent(a, p.tangent(), p.tangent() * u), 1.0 + 9.0 * c2, 1e-8);
  const BaseTerms b = base_ambient_term(p, derive(p), u, BoundId::SlantUpper);
  EXPECT_NEAR(b.upper, 1.0 + 1.5 * c2, 1e-12);
  const BaseTerms two = base_ambient_term(p, derive(p), u, BoundId::SlantTwosided);
  EXPECT_NEAR(two.lower, 1.0, 1e-12);
  EXPECT_NEAR(two.upper, 1.0 + 1.5 * c2, 1e-12);

  // At theta = pi/2 the base is the exact ambient Ricci curvature.
  const FrameSample tr = sample_frame(ClassTemplate::parse("slant"), 3, 0, QuaternionStructure::standard(3), rng);
  const SubmanifoldPoint pt(AmbientSpaceForm(QuaternionStructure::standard(3), 4.0, Convention::Tilde), tr.tangent,
                            tr.normal, {}, tr.tag);
  EXPECT_NEAR(base_ambient_term(pt, derive(pt), Vector::Unit(3, 1), BoundId::SlantHinevaLower).lower, 2.0, 1e-12);
}

TEST(Bounds, ApplicabilityByClass) {
  std::mt19937_64 rng(18);
  const SubmanifoldPoint g = test_support::random_generic(rng, 3, 2, 1.0);
  EXPECT_FALSE(admissible_indices(g, BoundId::SlantUpper));
  EXPECT_FALSE(admissible_indices(g, BoundId::CRUpperD));
  EXPECT_EQ(admissible_indices(g, BoundId::ChenRicciGeneral)->size(), 3u);
  EXPECT_EQ(code_of([&] { evaluate(g, BoundId::SlantUpper, Vector::Unit(3, 0)); }), Errc::wrong_distribution);
  const SubmanifoldPoint tr = test_support::totally_real_axes(3, 3, 1.0, {});
  EXPECT_EQ(admissible_indices(tr, BoundId::CRUpperDperp)->size(), 3u);
  EXPECT_FALSE(admissible_indices(tr, BoundId::CRUpperD));
  EXPECT_EQ(admissible_indices(tr, BoundId::SlantTwosided)->size(), 3u);
}

TEST(Bounds, InputErrors) {
  const SubmanifoldPoint p = test_support::totally_real_axes(3, 3, 1.0, {});
  EXPECT_EQ(code_of([&] { evaluate(p, BoundId::A3RicciUpper, Vector::Constant(3, 1.0)); }), Errc::invalid_input);
  EXPECT_EQ(code_of([&] { evaluate(p, BoundId::A3RicciUpper, Vector::Unit(2, 0)); }), Errc::invalid_input);
  EXPECT_EQ(code_of([&] { evaluate(p, BoundId::A1SectionalLower, Vector::Unit(3, 0)); }), Errc::invalid_input);
  EXPECT_EQ(code_of([&] { evaluate(p, BoundId::A1SectionalLower, Vector::Unit(3, 0), Vector(Vector::Unit(3, 0))); }),
            Errc::invalid_input);
  DerivedInvariants bad = derive(p);
  bad.umbilicity_defect = -1e-6;
  EXPECT_EQ(code_of([&] { hineva_lower_sqrt(0.0, bad, 3); }), Errc::internal_consistency);
  bad.umbilicity_defect = -1e-13;
  EXPECT_NO_THROW(hineva_lower_sqrt(0.0, bad, 3));
}

TEST(Bounds, SectionalLowerExactInDimensionTwo) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 50; ++t) {
    const SubmanifoldPoint p = test_support::random_generic(rng, 2, 2, 0.9, 2.0);
    const BoundReport r = evaluate(p, BoundId::A1SectionalLower, Vector::Unit(2, 0), Vector(Vector::Unit(2, 1)));
    EXPECT_NEAR(*r.gap_lower, 0.0, 1e-10 * r.scale());
  }
}

TEST(Bounds, GeneralBoundsHoldOnRandomPoints) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 5;
    const double scale = trial % 3 == 0 ? 0.1 : (trial % 3 == 1 ? 1.0 : 10.0);
    const SubmanifoldPoint p = test_support::random_generic(rng, n, 2, trial % 2 ? -1.0 : 2.0, scale);
    const DerivedInvariants inv = derive(p);
    const Vector x = test_support::random_unit(rng, n);
    Vector y = test_support::random_unit(rng, n);
    y = (y - y.dot(x) * x).normalized();
    for (BoundId id : {BoundId::A1SectionalLower, BoundId::A2SectionalUpper, BoundId::A3RicciUpper,
                       BoundId::A4RicciLower, BoundId::ChenRicciGeneral, BoundId::HinevaSqrtGeneral}) {
      const BoundReport r = evaluate(p, inv, id, x, info(id).sectional ? std::optional<Vector>(y) : std::nullopt);
      EXPECT_NE(r.status, Status::violated) << to_string(id) << " n=" << n;
    }
  }
}

TEST(Bounds, StatusTolerance) {
  const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {diag({1, 2})});
  const BoundReport r = evaluate(p, BoundId::QProjTwosided, Vector::Unit(2, 0), std::nullopt, 1e-9);
  EXPECT_DOUBLE_EQ(r.tol, 1e-9 * r.scale());
  EXPECT_TRUE(r.equal_lower);
  EXPECT_FALSE(r.equal_upper);
  EXPECT_LE(r.relative_violation(), 0.0);
}
