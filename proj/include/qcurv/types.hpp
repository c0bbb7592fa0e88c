#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qcurv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Error categories raised by the library. The CLI maps all of them to exit code 2.
enum class Errc {
  invalid_dimension,
  invalid_input,
  invalid_point,
  wrong_distribution,
  internal_consistency,
  invalid_moments,
  unknown_bound,
  parse_error,
  infeasible,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Entrywise max-norm; zero for empty matrices.
inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace qcurv
