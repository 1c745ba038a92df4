#pragma once

#include "destsim/core.hpp"
#include "destsim/interaction.hpp"
#include "destsim/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace destsim {

/// Co-search counts between destination pairs plus per-destination supports.
/// counts(i,i) == support(i); counts is symmetric; every entry is bounded by
/// min(support(i), support(j)) <= user_count.
struct CooccurrenceStats {
  CountMatrix counts;    // n x n
  CountVector support;   // length n
  std::int64_t user_count = 0;

  // Provenance carried through to similarity matrices and sidecars.
  std::vector<std::string> dest_codes;
  std::string market;
  std::optional<TimeWindow> window;

  Index n() const { return support.size(); }
};

/// Accumulates co-search counts by walking each user's destination run and
/// emitting its pairs (cost sums the squared user degrees). `shards` splits
/// users into blocks merged by addition; the result is identical for any
/// shard count.
CooccurrenceStats cooccurrence(const InteractionMatrix& matrix, int shards = 1);

enum class PopularityDenominator { destinations, users };

inline std::string_view to_string(PopularityDenominator d) {
  return d == PopularityDenominator::destinations ? "n" : "m";
}

/// Popularity rank b and score p per destination: b ascends with support
/// (least searched gets 1), ties broken by ascending code, and
/// p_i = 1 - w * b_i / denominator. More searched => larger b => smaller p.
struct PopularityVector {
  Eigen::VectorXi rank;   // permutation of 1..n
  Eigen::VectorXd p;
  double w = 0.0;
  PopularityDenominator denominator = PopularityDenominator::destinations;

  Index n() const { return p.size(); }
};

/// Requires 0 <= w < 1.
PopularityVector popularity(const CooccurrenceStats& stats, double w,
                            PopularityDenominator denominator =
                                PopularityDenominator::destinations);

}  // namespace destsim
