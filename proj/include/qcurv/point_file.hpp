#pragma once

#include <optional>
#include <string>

#include "qcurv/equality.hpp"

namespace qcurv {

/// Metadata attached to points written by the search tools.
struct WitnessInfo {
  BoundId bound{};
  Vector direction;
  std::optional<Vector> direction2;
  double objective = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

struct PointDocument {
  SubmanifoldPoint point;
  std::optional<EqualitySpec> equality;
  std::optional<WitnessInfo> witness;
};

/// Parses a JSON point document:
///
///   {
///     "m": 2, "c": 1.0, "convention": "eq21",
///     "tangent_frame": [[...4m reals...], ...],      // n rows
///     "normal_frame":  [[...]],                       // optional
///     "h": [ [[n x n]], ... ],                        // alias "sigma"
///     "class": "totally-real" | {"tag": "cr", "invariant_indices": [1,2,3,4]}
///              | {"tag": "slant", "theta": 1.2},
///     "equality": {"kind": "chen", "n": 3, "pairs": [[l, mu], ...]}  // optional
///   }
///
/// Frame vectors are rows. CR invariant indices are 1-based. When "h" is absent
/// it is built from "equality". Errors are Errc::parse_error and name the field
/// (or the line for JSON syntax errors).
PointDocument parse_point_document(const std::string& text);
PointDocument load_point_file(const std::string& path);

std::string to_json(const SubmanifoldPoint& p, const std::optional<WitnessInfo>& witness = std::nullopt);
void save_point_file(const std::string& path, const SubmanifoldPoint& p,
                     const std::optional<WitnessInfo>& witness = std::nullopt);

}  // namespace qcurv
