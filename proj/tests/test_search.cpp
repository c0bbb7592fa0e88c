#include <gtest/gtest.h>

#include "support.hpp"

using namespace qcurv;

namespace {

CampaignConfig small_config(const std::string& cls, const std::string& bounds, int trials = 40) {
  CampaignConfig c;
  c.seed = 99;
  c.trials = trials;
  c.cls = ClassTemplate::parse(cls);
  c.bounds = parse_bound_list(bounds);
  c.sff_scales = {0.1, 1.0, 10.0};
  c.c_values = {-1.0, 2.0};
  return c;
}

bool same_point(const SubmanifoldPoint& a, const SubmanifoldPoint& b) {
  if (a.tangent() != b.tangent() || a.normal() != b.normal() || a.sff().size() != b.sff().size()) return false;
  for (std::size_t i = 0; i < a.sff().size(); ++i) {
    if (a.sff()[i] != b.sff()[i]) return false;
  }
  return a.ambient().c() == b.ambient().c();
}

}  // namespace

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a = make_rng(5, 1, 7), b = make_rng(5, 1, 7), c = make_rng(5, 2, 7), d = make_rng(5, 1, 8);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(ClassTemplate, ParseAndPrint) {
  EXPECT_EQ(ClassTemplate::parse("generic").kind, ClassTemplate::Kind::Generic);
  EXPECT_EQ(ClassTemplate::parse("cr:2").cr_blocks, 2);
  EXPECT_EQ(ClassTemplate::parse("cr").cr_blocks, -1);
  EXPECT_DOUBLE_EQ(ClassTemplate::parse("slant:0.5").theta, 0.5);
  EXPECT_DOUBLE_EQ(ClassTemplate::parse("slant").theta, M_PI / 2);
  EXPECT_EQ(ClassTemplate::parse(ClassTemplate::parse("slant:0.5").to_string()).theta, 0.5);
  for (const char* bad : {"cr:-1", "cr:x", "slant:0", "slant:2", "hyper", "generic:1"}) {
    EXPECT_THROW(ClassTemplate::parse(bad), Error) << bad;
  }
}

TEST(MinimalM, Values) {
  EXPECT_EQ(minimal_m(ClassTemplate::parse("generic"), 5, 0), 2);
  EXPECT_EQ(minimal_m(ClassTemplate::parse("generic"), 3, 0), 1);
  EXPECT_EQ(minimal_m(ClassTemplate::parse("totally-real"), 3, 0), 3);
  EXPECT_EQ(minimal_m(ClassTemplate::parse("cr"), 6, 1), 3);
  EXPECT_EQ(minimal_m(ClassTemplate::parse("slant"), 4, 0), 4);
  EXPECT_EQ(minimal_m(ClassTemplate::parse("slant:1"), 2, 0), 2);
}

TEST(SampleFrame, TotallyRealIsExact) {
  Rng rng = make_rng(1, 0, 0);
  for (int m = 2; m <= 5; ++m) {
    const QuaternionStructure q = QuaternionStructure::standard(m);
    const FrameSample fs = sample_frame(ClassTemplate::parse("totally-real"), m, 0, q, rng);
    ASSERT_TRUE(fs.feasible) << fs.reason;
    const SubmanifoldPoint p(AmbientSpaceForm(q, 1.0), fs.tangent, fs.normal, {}, fs.tag);
    const DerivedInvariants inv = derive(p);
    for (double v : inv.pNorm2) EXPECT_LE(v, 1e-16);
  }
  const FrameSample bad = sample_frame(ClassTemplate::parse("totally-real"), 3, 0, QuaternionStructure::standard(2), rng);
  EXPECT_FALSE(bad.feasible);
  EXPECT_FALSE(bad.reason.empty());
}

TEST(SampleFrame, CRDimensionBookkeeping) {
  Rng rng = make_rng(2, 0, 0);
  const QuaternionStructure q = QuaternionStructure::standard(3);
  const FrameSample fs = sample_frame(ClassTemplate::parse("cr:1"), 6, 1, q, rng);
  ASSERT_TRUE(fs.feasible) << fs.reason;
  EXPECT_EQ(fs.normal.cols(), 6);
  const auto& cr = std::get<tag::CR>(fs.tag);
  EXPECT_EQ(cr.invariant, (std::vector<int>{0, 1, 2, 3}));
  EXPECT_TRUE(is_totally_real_pair(q, fs.tangent.col(4), fs.tangent.col(5), 1e-10));
  // Q(D) and the quaternionic lines of D-perp are mutually orthogonal: 4(1 + 2) > 8.
  EXPECT_FALSE(sample_frame(ClassTemplate::parse("cr:1"), 6, 1, QuaternionStructure::standard(2), rng).feasible);
  EXPECT_FALSE(sample_frame(ClassTemplate::parse("cr:1"), 7, 1, q, rng).feasible);
}

TEST(SampleFrame, SlantRightAngleMatchesTotallyReal) {
  const QuaternionStructure q = QuaternionStructure::standard(3);
  Rng a = make_rng(3, 0, 0), b = make_rng(3, 0, 0);
  const FrameSample s = sample_frame(ClassTemplate::parse("slant"), 3, 0, q, a);
  const FrameSample t = sample_frame(ClassTemplate::parse("totally-real"), 3, 0, q, b);
  ASSERT_TRUE(s.feasible && t.feasible);
  EXPECT_EQ(s.tangent, t.tangent);
}

TEST(SampleFrame, ProperSlant) {
  Rng rng = make_rng(4, 0, 0);
  const QuaternionStructure q = QuaternionStructure::standard(2);
  const FrameSample fs = sample_frame(ClassTemplate::parse("slant:1.2"), 2, 0, q, rng);
  ASSERT_TRUE(fs.feasible) << fs.reason;
  const SubmanifoldPoint p(AmbientSpaceForm(q, 1.0), fs.tangent, fs.normal, {}, fs.tag);
  EXPECT_TRUE(check_class(p).pass);
  // Odd dimension cannot carry a proper slant structure.
  EXPECT_FALSE(sample_frame(ClassTemplate::parse("slant:1.2"), 3, 0, QuaternionStructure::standard(3), rng).feasible);
  // n = 2 needs 3 cos^2(theta) <= 1.
  EXPECT_FALSE(sample_frame(ClassTemplate::parse("slant:0.3"), 2, 0, q, rng).feasible);
}

TEST(SamplePoint, Deterministic) {
  const CampaignConfig c = small_config("generic", "chen_ricci.general");
  for (std::uint64_t t = 0; t < 10; ++t) {
    const SampledTrial a = sample_point(c, t), b = sample_point(c, t);
    ASSERT_TRUE(a.point && b.point);
    EXPECT_TRUE(same_point(*a.point, *b.point));
  }
  EXPECT_FALSE(same_point(*sample_point(c, 0).point, *sample_point(c, 1).point));
}

TEST(SamplePoint, ZeroScaleIsTotallyGeodesic) {
  CampaignConfig c = small_config("generic", "chen_ricci.general");
  c.sff_scales = {0.0};
  const SampledTrial t = sample_point(c, std::uint64_t{3});
  ASSERT_TRUE(t.point);
  EXPECT_EQ(derive(*t.point).sffNorm2, 0.0);
}

TEST(SamplePoint, SecondMomentOfSymmetrizedGaussian) {
  // E|h|^2 = s^2 * codim * n(n+1) for h = s (G + G^T) / sqrt(2).
  CampaignConfig c = small_config("generic", "chen_ricci.general");
  c.n_min = c.n_max = 3;
  c.m_min = c.m_max = 2;
  c.sff_scales = {0.7};
  double sum = 0.0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) sum += derive(*sample_point(c, static_cast<std::uint64_t>(t)).point).sffNorm2;
  const double expect = 0.49 * 5 * 12;
  EXPECT_NEAR(sum / trials, expect, 0.02 * expect);
}

TEST(CampaignConfig, Validation) {
  CampaignConfig c = small_config("generic", "chen_ricci.general");
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), Error);
  c = small_config("totally-real", "qproj.upper");
  c.m_max = 2;
  c.n_max = 3;
  EXPECT_THROW(c.validate(), Error);
  c = small_config("generic", "chen_ricci.general");
  c.n_min = 1;
  EXPECT_THROW(c.validate(), Error);
  c = small_config("generic", "chen_ricci.general");
  c.sff_scales = {-1.0};
  EXPECT_THROW(c.validate(), Error);
  EXPECT_NE(small_config("generic", "A1").hash(), small_config("generic", "A2").hash());
  EXPECT_EQ(small_config("generic", "A1").hash(), small_config("generic", "A1").hash());
}

TEST(Campaign, DeterministicAcrossThreadCounts) {
  CampaignConfig c = small_config("generic", "chen_ricci.general,A1", 30);
  const CampaignResult a = run_campaign(c);
  c.threads = 3;
  const CampaignResult b = run_campaign(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].trial, b.rows[i].trial);
    EXPECT_EQ(a.rows[i].lhs, b.rows[i].lhs);
    EXPECT_EQ(a.rows[i].direction, b.rows[i].direction);
  }
  EXPECT_EQ(a.count(Status::violated), 0);
  for (std::size_t i = 1; i < a.rows.size(); ++i) EXPECT_LE(a.rows[i - 1].trial, a.rows[i].trial);
}

TEST(Campaign, ReportsRejections) {
  CampaignConfig c = small_config("slant:1.0", "slant.upper", 20);
  c.n_min = 3;
  c.n_max = 3;
  const CampaignResult r = run_campaign(c);
  EXPECT_EQ(r.rejected, 20);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_FALSE(r.reject_reasons.empty());
}

TEST(Falsify, DeterministicAndSound) {
  const CampaignConfig c = small_config("generic", "chen_ricci.general");
  const SearchResult a = falsify(c, BoundId::ChenRicciGeneral, {8, 100});
  const SearchResult b = falsify(c, BoundId::ChenRicciGeneral, {8, 100});
  ASSERT_TRUE(a.witness && b.witness);
  EXPECT_EQ(a.best_objective, b.best_objective);
  EXPECT_TRUE(same_point(*a.witness, *b.witness));
  EXPECT_EQ(a.direction, b.direction);
  EXPECT_NEAR(reevaluate_violation(a), a.best_objective, 1e-12);
  EXPECT_LE(a.best_objective, 1e-9);
  EXPECT_EQ(a.restarts_run, 8);
}

TEST(Falsify, TotallyGeodesicStartHasNoViolation) {
  CampaignConfig c = small_config("generic", "hineva_sqrt.general");
  c.sff_scales = {0.0};
  const SearchResult r = falsify(c, BoundId::HinevaSqrtGeneral, {4, 0});
  ASSERT_TRUE(r.report);
  EXPECT_LE(r.best_objective, 0.0);
  EXPECT_NEAR(*r.report->gap_lower, 0.0, 1e-12);
}

TEST(Falsify, FindsViolationOfPrintedVariant) {
  CampaignConfig c = small_config("generic", "verma.printed_lower");
  c.n_min = c.n_max = 3;
  const SearchResult r = falsify(c, BoundId::VermaPrintedLower, {10, 200});
  ASSERT_TRUE(r.report);
  EXPECT_GT(r.best_objective, 1e-3);
  EXPECT_EQ(r.report->status, Status::violated);
  EXPECT_NEAR(reevaluate_violation(r), r.best_objective, 1e-12);
}

TEST(Falsify, SkipsInapplicableClass) {
  const CampaignConfig c = small_config("generic", "slant.upper");
  const SearchResult r = falsify(c, BoundId::SlantUpper, {3, 10});
  EXPECT_FALSE(r.witness);
  EXPECT_EQ(r.restarts_skipped, 3);
  EXPECT_THROW(reevaluate_violation(r), Error);
}

TEST(ApproachEquality, TwoDimensionalUpperBound) {
  CampaignConfig c = small_config("generic", "chen_ricci.general");
  c.n_min = c.n_max = 2;
  c.c_values = {1.0};
  c.sff_scales = {1.0};
  const SearchResult r = approach_equality(c, BoundId::ChenRicciGeneral, {10, 2000});
  ASSERT_TRUE(r.witness);
  EXPECT_LT(r.best_objective, 1e-8);
  double h2 = 0.0;
  for (const Matrix& h : r.witness->sff()) h2 += h.squaredNorm();
  EXPECT_LE(upper_equality_residual(*r.witness, r.direction), 1e-4 * std::max(1.0, std::sqrt(h2)));
  EXPECT_TRUE(r.diagnosis);
}

TEST(ApproachEquality, TotallyGeodesicStartClosesTwoSidedGap) {
  // At a totally geodesic point both sides of the two-sided bound coincide with Ric.
  CampaignConfig c = small_config("totally-real", "qproj.twosided");
  c.sff_scales = {0.0};
  c.n_min = c.n_max = 2;
  const SearchResult r = approach_equality(c, BoundId::QProjTwosided, {2, 0});
  ASSERT_TRUE(r.report);
  EXPECT_NEAR(*r.report->gap_lower, 0.0, 1e-12);
}
