#include "physr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "physr/errors.hpp"

namespace physr::metrics {

MassEval evaluate(std::span<const MassPair> pairs) {
  if (pairs.empty()) throw PreconditionError("evaluate: need at least one pair");
  MassEval e;
  for (const auto& [p, g] : pairs) {
    if (!(p > 0.0) || !(g > 0.0) || !std::isfinite(p) || !std::isfinite(g)) {
      throw ValidationError("evaluate: masses must be positive and finite");
    }
    e.ade += std::abs(p - g);
    e.alde += std::abs(std::log(p) - std::log(g));
    e.ape += std::abs(p - g) / g;
    e.mnre += std::min(p / g, g / p);
  }
  e.count = pairs.size();
  const auto n = static_cast<double>(e.count);
  e.ade /= n;
  e.alde /= n;
  e.ape /= n;
  e.mnre /= n;
  return e;
}

std::string eval_rows_csv(std::span<const EvalRow> rows) {
  std::ostringstream out;
  out.precision(10);
  out << "scene_id,predicted_kg,truth_kg,ade,alde,ape,mnre\n";
  std::vector<MassPair> pairs;
  for (const auto& r : rows) {
    const MassEval e = evaluate({&r.pair, 1});
    out << r.scene_id << ',' << r.pair.predicted << ',' << r.pair.truth << ',' << e.ade << ',' << e.alde << ','
        << e.ape << ',' << e.mnre << '\n';
    pairs.push_back(r.pair);
  }
  if (!pairs.empty()) {
    const MassEval e = evaluate(pairs);
    out << "mean,,," << e.ade << ',' << e.alde << ',' << e.ape << ',' << e.mnre << '\n';
  }
  return out.str();
}

}  // namespace physr::metrics
