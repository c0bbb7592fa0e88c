#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "qcurv/ambient_curvature.hpp"

namespace qcurv {

namespace tag {
struct Generic {};
struct TotallyReal {};
/// Quaternionic CR structure. `invariant` lists the 0-based tangent-frame indices
/// spanning D; the remaining indices span the totally real D-perp.
struct CR {
  std::vector<int> invariant;
};
/// theta in (0, pi/2], radians.
struct Slant {
  double theta = 0.0;
};
}  // namespace tag

using ClassTag = std::variant<tag::Generic, tag::TotallyReal, tag::CR, tag::Slant>;

std::string class_name(const ClassTag& tag);

/// Pointwise extrinsic data of a submanifold: orthonormal tangent and normal
/// frames (as columns) and the second fundamental form h^alpha_ij = g(h(e_i,e_j), xi_alpha).
class SubmanifoldPoint {
 public:
  /// Validates every invariant exactly (Gram residual <= 1e-10, symmetric h within
  /// 1e-12, 2 <= n < 4m). Fewer h matrices than normal directions are padded with zeros.
  SubmanifoldPoint(AmbientSpaceForm ambient, Matrix tangent, Matrix normal,
                   std::vector<Matrix> sff, ClassTag tag = tag::Generic{});

  /// Tolerant constructor for serialized data: frames with Gram residual in
  /// (1e-10, 1e-6] are re-orthonormalized, larger residuals are rejected. An
  /// empty normal frame is replaced by the orthonormal complement.
  static SubmanifoldPoint from_data(AmbientSpaceForm ambient, Matrix tangent,
                                    Matrix normal, std::vector<Matrix> sff,
                                    ClassTag tag = tag::Generic{});

  const AmbientSpaceForm& ambient() const noexcept { return ambient_; }
  int n() const noexcept { return static_cast<int>(tangent_.cols()); }
  int codim() const noexcept { return static_cast<int>(normal_.cols()); }
  const Matrix& tangent() const noexcept { return tangent_; }
  const Matrix& normal() const noexcept { return normal_; }
  const std::vector<Matrix>& sff() const noexcept { return sff_; }
  const ClassTag& class_tag() const noexcept { return tag_; }

  /// Normal-frame coordinates of h(u, v) for tangent-frame coordinates u, v.
  Vector h(const Vector& u, const Vector& v) const;

  /// Tangent-frame coordinates of an ambient vector; throws when the vector is not tangent.
  Vector to_tangent_coords(const Vector& x, const char* name = "vector") const;

  SubmanifoldPoint with_sff(std::vector<Matrix> sff) const;
  SubmanifoldPoint with_ambient(AmbientSpaceForm ambient) const;

 private:
  AmbientSpaceForm ambient_;
  Matrix tangent_;
  Matrix normal_;
  std::vector<Matrix> sff_;
  ClassTag tag_;
};

/// Orthonormal basis of the orthogonal complement of the columns of `frame`.
Matrix orthonormal_complement(const Matrix& frame);

struct DerivedInvariants {
  Vector H;                        // normal-frame coordinates of the mean curvature vector
  double meanH2 = 0.0;             // |H|^2
  double sffNorm2 = 0.0;           // |h|^2
  double umbilicity_defect = 0.0;  // sum_alpha |h^alpha - H_alpha Id|^2 = |h|^2 - n|H|^2
  std::array<Matrix, 3> P;         // (P_l)_ij = g(phi_l e_i, e_j)
  std::array<double, 3> pNorm2{};
  std::array<double, 3> fNorm2{};  // normal parts |F_l|^2
};

DerivedInvariants derive(const SubmanifoldPoint& p);

/// R(X,Y,Z,W) of the submanifold via the Gauss equation:
/// R = R~ + <h(X,W), h(Y,Z)> - <h(X,Z), h(Y,W)>, so that K(X,Y) = K~ + <h(X,X),h(Y,Y)> - |h(X,Y)|^2.
/// Arguments are ambient vectors that must be tangent.
double intrinsic_curvature_4(const SubmanifoldPoint& p, const Vector& x, const Vector& y,
                             const Vector& z, const Vector& w);

/// Ricci curvature Ric(X) of the submanifold for a unit tangent X, summed over an
/// orthonormal completion of X inside the tangent space.
double ricci(const SubmanifoldPoint& p, const Vector& x);

double sectional(const SubmanifoldPoint& p, const Vector& x, const Vector& y);

struct ClassReport {
  bool pass = false;
  double max_residual = 0.0;
  std::string detail;
};

/// Numerically certifies the declared class. Slant points are sampled over all
/// frame vectors plus `slant_samples` random unit tangent vectors.
ClassReport check_class(const SubmanifoldPoint& p, double tol = 1e-8,
                        int slant_samples = 100);

}  // namespace qcurv
