#include <gtest/gtest.h>

#include "support.hpp"

using namespace qcurv;

namespace {

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

TEST(SubmanifoldPoint, ValidatesInput) {
  const AmbientSpaceForm a(QuaternionStructure::standard(2), 1.0);
  const Matrix t = test_support::axes(2, {0, 4});
  const Matrix nrm = orthonormal_complement(t);
  Matrix asym(2, 2);
  asym << 1, 2, 2.1, 3;
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm, {asym}); }), Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, test_support::axes(2, {0}), orthonormal_complement(test_support::axes(2, {0})), {}); }),
            Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, 1.01 * t, nrm, {}); }), Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm.leftCols(5), {}); }), Errc::invalid_point);
  std::vector<Matrix> too_many(7, Matrix::Zero(2, 2));
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm, too_many); }), Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm, {}, tag::Slant{0.0}); }), Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm, {}, tag::CR{{0, 0}}); }), Errc::invalid_point);
  EXPECT_EQ(code_of([&] { SubmanifoldPoint(a, t, nrm, {}, tag::CR{{2}}); }), Errc::invalid_point);
}

TEST(SubmanifoldPoint, PadsSecondFundamentalForm) {
  const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {Matrix::Identity(2, 2)});
  ASSERT_EQ(p.sff().size(), 6u);
  EXPECT_EQ(p.sff()[0], Matrix::Identity(2, 2));
  for (std::size_t a = 1; a < 6; ++a) EXPECT_EQ(p.sff()[a], Matrix::Zero(2, 2));
}

TEST(SubmanifoldPoint, FromDataRepairsSmallResiduals) {
  const AmbientSpaceForm a(QuaternionStructure::standard(2), 1.0);
  Matrix t = test_support::axes(2, {0, 4});
  t(4, 0) = 1e-8;  // Gram off-diagonal 1e-8: repaired
  const SubmanifoldPoint p = SubmanifoldPoint::from_data(a, t, Matrix(), {});
  EXPECT_LE(max_abs(p.tangent().transpose() * p.tangent() - Matrix::Identity(2, 2)), 1e-14);
  EXPECT_EQ(p.codim(), 6);
  EXPECT_LE(max_abs(p.tangent() - t), 1e-7);
  t(4, 0) = 1e-3;
  EXPECT_EQ(code_of([&] { SubmanifoldPoint::from_data(a, t, Matrix(), {}); }), Errc::invalid_point);
}

TEST(SubmanifoldPoint, AutoNormalGivesSameCurvature) {
  const AmbientSpaceForm a(QuaternionStructure::standard(2), 1.0);
  const Matrix t = test_support::axes(2, {0, 4});
  Matrix h(2, 2);
  h << 1, 0, 0, 2;
  const auto p1 = SubmanifoldPoint::from_data(a, t, Matrix(), {h});
  const auto p2 = SubmanifoldPoint::from_data(a, t, orthonormal_complement(t), {h});
  EXPECT_DOUBLE_EQ(ricci(p1, t.col(0)), ricci(p2, t.col(0)));
  EXPECT_DOUBLE_EQ(ricci(p1, t.col(0)), 3.0);
}

TEST(Gauss, SectionalMatchesEntrywiseOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const SubmanifoldPoint p = test_support::random_generic(rng, n, 2, 0.7, 1.0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        EXPECT_NEAR(sectional(p, p.tangent().col(i), p.tangent().col(j)), test_support::gauss_sectional_oracle(p, i, j),
                    1e-11);
      }
    }
  }
}

TEST(Gauss, TwoDimensionalDiagonal) {
  // K = c + lambda mu for h = diag(lambda, mu) on a totally real plane.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 50; ++t) {
    const double l = u(rng), m = u(rng);
    const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {Matrix(Eigen::Vector2d(l, m).asDiagonal())});
    EXPECT_NEAR(sectional(p, p.tangent().col(0), p.tangent().col(1)), 1.0 + l * m, 1e-13);
  }
}

TEST(Gauss, CurvatureSymmetriesAndBianchi) {
  std::mt19937_64 rng(23);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 5;
    const SubmanifoldPoint p = test_support::random_generic(rng, n, 2, 1.0, 1.0);
    auto tv = [&] { return Vector(p.tangent() * test_support::random_unit(rng, n)); };
    const Vector x = tv(), y = tv(), z = tv(), w = tv();
    const double r = intrinsic_curvature_4(p, x, y, z, w);
    worst = std::max({worst, std::abs(r + intrinsic_curvature_4(p, y, x, z, w)),
                      std::abs(r + intrinsic_curvature_4(p, x, y, w, z)),
                      std::abs(r - intrinsic_curvature_4(p, z, w, x, y)),
                      std::abs(r + intrinsic_curvature_4(p, y, z, x, w) + intrinsic_curvature_4(p, z, x, y, w))});
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Ricci, IndependentOfCompletion) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    const SubmanifoldPoint p = test_support::random_generic(rng, n, 2, -1.2, 2.0);
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != i) sum += test_support::gauss_sectional_oracle(p, i, j);
      }
      EXPECT_NEAR(ricci(p, p.tangent().col(i)), sum, 1e-10 * std::max(1.0, std::abs(sum)));
    }
    // Rotate the frame: trace over the rotated frame must agree.
    const Vector u = test_support::random_unit(rng, n);
    const Vector x = p.tangent() * u;
    Eigen::HouseholderQR<Matrix> qr(Matrix::Random(n, n));
    const Matrix rot = qr.householderQ();
    const Matrix f = p.tangent() * rot;
    double trace = 0.0;
    for (int j = 0; j < n; ++j) trace += intrinsic_curvature_4(p, x, f.col(j), f.col(j), x);
    EXPECT_NEAR(ricci(p, x), trace, 1e-10 * std::max(1.0, std::abs(trace)));
  }
  const SubmanifoldPoint p = test_support::totally_real_axes(2, 2, 1.0, {});
  EXPECT_THROW(ricci(p, 2.0 * p.tangent().col(0)), Error);
  EXPECT_THROW(ricci(p, Vector::Unit(8, 1)), Error);
}

TEST(DerivedInvariants, MomentsAndCauchySchwarz) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const SubmanifoldPoint p = test_support::random_generic(rng, n, 2, 1.0, trial % 2 ? 10.0 : 0.1);
    const DerivedInvariants inv = derive(p);
    double s = 0.0, h2 = 0.0;
    for (const Matrix& h : p.sff()) {
      s += h.squaredNorm();
      h2 += (h.trace() / n) * (h.trace() / n);
    }
    EXPECT_NEAR(inv.sffNorm2, s, 1e-12 * s);
    EXPECT_NEAR(inv.meanH2, h2, 1e-12 * std::max(1.0, h2));
    EXPECT_GE(inv.umbilicity_defect, 0.0);
    EXPECT_GE(inv.sffNorm2 - n * inv.meanH2, -1e-12 * std::max(1.0, s));
    EXPECT_NEAR(inv.umbilicity_defect, s - n * h2, 1e-10 * std::max(1.0, s));
  }
}

TEST(DerivedInvariants, TangentialQuaternionParts) {
  const SubmanifoldPoint tr = test_support::totally_real_axes(3, 3, 1.0, {});
  const DerivedInvariants inv = derive(tr);
  for (int l = 0; l < 3; ++l) EXPECT_LE(inv.pNorm2[static_cast<std::size_t>(l)], 1e-30);
  // span{e1, I e1}: P_I has entries +-1.
  const AmbientSpaceForm a(QuaternionStructure::standard(1), 1.0);
  const Matrix t = test_support::axes(1, {0, 1});
  const SubmanifoldPoint p(a, t, orthonormal_complement(t), {});
  EXPECT_NEAR(derive(p).pNorm2[0], 2.0, 1e-15);
  EXPECT_NEAR(derive(p).pNorm2[1], 0.0, 1e-15);
}

TEST(CheckClass, Classes) {
  std::mt19937_64 rng(51);
  const QuaternionStructure q = QuaternionStructure::standard(3);
  const AmbientSpaceForm a(q, 1.0);
  const FrameSample tr = sample_frame(ClassTemplate::parse("totally-real"), 3, 0, q, rng);
  ASSERT_TRUE(tr.feasible) << tr.reason;
  EXPECT_TRUE(check_class(SubmanifoldPoint(a, tr.tangent, tr.normal, {}, tag::TotallyReal{})).pass);
  EXPECT_TRUE(check_class(SubmanifoldPoint(a, tr.tangent, tr.normal, {}, tag::Slant{M_PI / 2})).pass);

  const FrameSample gen = sample_frame(ClassTemplate{}, 3, 0, q, rng);
  EXPECT_TRUE(check_class(SubmanifoldPoint(a, gen.tangent, gen.normal, {})).pass);
  EXPECT_FALSE(check_class(SubmanifoldPoint(a, gen.tangent, gen.normal, {}, tag::TotallyReal{})).pass);
  EXPECT_FALSE(check_class(SubmanifoldPoint(a, gen.tangent, gen.normal, {}, tag::Slant{1.0})).pass);

  const FrameSample cr = sample_frame(ClassTemplate::parse("cr:1"), 6, 1, q, rng);
  ASSERT_TRUE(cr.feasible) << cr.reason;
  EXPECT_TRUE(check_class(SubmanifoldPoint(a, cr.tangent, cr.normal, {}, cr.tag)).pass);
  // Declaring the wrong invariant indices fails.
  EXPECT_FALSE(check_class(SubmanifoldPoint(a, cr.tangent, cr.normal, {}, tag::CR{{1, 2, 3, 4}})).pass);
}
