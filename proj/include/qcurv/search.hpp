#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qcurv/equality.hpp"

namespace qcurv {

using Rng = std::mt19937_64;

/// Deterministic generator for (seed, stream, index); independent streams for
/// sampling, falsification and equality searches.
Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Class to sample, before the dimensions of a trial are known.
struct ClassTemplate {
  enum class Kind { Generic, TotallyReal, CR, Slant };
  Kind kind = Kind::Generic;
  int cr_blocks = -1;        // quaternionic blocks in D; -1 picks one of 0..n/4 per trial
  double theta = M_PI / 2;   // slant angle

  /// "generic", "totally-real", "cr", "cr:<blocks>", "slant", "slant:<theta>".
  static ClassTemplate parse(const std::string& s);
  std::string to_string() const;
};

struct FrameSample {
  bool feasible = false;
  std::string reason;
  Matrix tangent;
  Matrix normal;
  ClassTag tag;
};

/// Samples an admissible orthonormal frame of the requested class in R^{4m}.
/// For CR the first 4*blocks tangent vectors span D. Returns an infeasibility
/// report instead of throwing when the class cannot be realized.
FrameSample sample_frame(const ClassTemplate& cls, int n, int cr_blocks,
                         const QuaternionStructure& q, Rng& rng);

/// Smallest m for which the class can fit an n-dimensional tangent space.
int minimal_m(const ClassTemplate& cls, int n, int cr_blocks);

struct CampaignConfig {
  std::uint64_t seed = 1;
  int trials = 100;
  int n_min = 2;
  int n_max = 5;
  int m_min = 1;
  int m_max = 0;  // 0: minimal feasible m plus at most one extra block
  std::vector<double> c_values{1.0};
  Convention convention = Convention::Eq21;
  ClassTemplate cls;
  std::vector<BoundId> bounds;
  std::vector<double> sff_scales{1.0};
  double tol = 1e-9;          // relative status tolerance
  int random_directions = 1;  // random unit directions per Ricci bound, beyond frame vectors
  int threads = 1;

  /// Throws Errc::invalid_input on inconsistent settings.
  void validate() const;
  std::uint64_t hash() const;
};

struct SampledTrial {
  std::optional<SubmanifoldPoint> point;
  std::string reject_reason;
  int n = 0;
  int m = 0;
  double c = 0.0;
  double sff_scale = 0.0;
};

/// Frame + independent symmetric Gaussian h^alpha = scale * (G + G^T) / sqrt(2).
/// Deterministic given (config.seed, trial).
SampledTrial sample_point(const CampaignConfig& config, std::uint64_t trial);
SampledTrial sample_point(const CampaignConfig& config, Rng& rng);

struct ReportRow {
  std::string bound_id;
  std::uint64_t trial = 0;
  int n = 0;
  int m = 0;
  double c = 0.0;
  std::string convention;
  std::string direction;
  double lhs = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> gap_lower;
  std::optional<double> gap_upper;
  std::string status;
};

struct Violation {
  std::uint64_t trial = 0;
  BoundId bound{};
  std::string direction;
  Vector x;
  std::optional<Vector> y;
  SubmanifoldPoint point;
  double relative_violation = 0.0;
};

struct BoundSummary {
  long satisfied = 0;
  long equality = 0;
  long violated = 0;
  double min_rel_gap_lower = std::numeric_limits<double>::infinity();
  double min_rel_gap_upper = std::numeric_limits<double>::infinity();
  std::vector<double> rel_gaps;  // min relative gap per row, for histograms
};

struct CampaignResult {
  std::vector<ReportRow> rows;
  std::map<BoundId, BoundSummary> summary;
  std::vector<Violation> violations;
  long rejected = 0;
  long not_applicable = 0;  // (trial, bound) pairs whose distribution was empty
  std::vector<std::string> reject_reasons;

  long count(Status s) const;
};

/// Evaluates every configured bound on every trial point over all admissible
/// frame directions plus random directions. Rows are produced in trial order.
CampaignResult run_campaign(const CampaignConfig& config);

struct SearchBudget {
  int restarts = 100;
  int steps = 200;
};

struct SearchResult {
  BoundId bound{};
  double best_objective = 0.0;
  std::optional<SubmanifoldPoint> witness;
  Vector direction;
  std::optional<Vector> direction2;
  std::optional<BoundReport> report;
  int best_restart = -1;
  int restarts_run = 0;
  int restarts_skipped = 0;
  long evaluations = 0;
  long improvements = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::optional<EqualityDiagnosis> diagnosis;
};

/// Multi-start coordinate hill climbing maximizing the relative violation
/// max(-gap_lower, -gap_upper) / max(1, |lhs|, |lower|, |upper|).
SearchResult falsify(const CampaignConfig& config, BoundId bound, SearchBudget budget);

/// Same machinery minimizing the relative |gap| (both sides for two-sided bounds)
/// at fixed |h|. Witnesses below 1e-8 are diagnosed with the equality lab.
SearchResult approach_equality(const CampaignConfig& config, BoundId bound, SearchBudget budget);

/// Re-evaluates a search witness; equals best_objective exactly for falsify.
double reevaluate_violation(const SearchResult& r, double rel_tol = 1e-9);

}  // namespace qcurv
