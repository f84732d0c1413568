#pragma once

#include <span>
#include <string>
#include <vector>

namespace physr::metrics {

struct MassPair {
  double predicted = 0.0;  // kg
  double truth = 0.0;      // kg
};

// Mean absolute difference, mean absolute log difference, mean absolute
// percentage error and mean min-ratio (higher is better, 1 = perfect).
struct MassEval {
  std::size_t count = 0;
  double ade = 0.0;
  double alde = 0.0;
  double ape = 0.0;
  double mnre = 0.0;
};

// Throws PreconditionError for an empty input and ValidationError for a
// non-positive value.
MassEval evaluate(std::span<const MassPair> pairs);

struct EvalRow {
  std::string scene_id;
  MassPair pair;
};

// CSV with header scene_id,predicted_kg,truth_kg,ade,alde,ape,mnre; one row
// per scene followed by a row named "mean".
std::string eval_rows_csv(std::span<const EvalRow> rows);

}  // namespace physr::metrics
