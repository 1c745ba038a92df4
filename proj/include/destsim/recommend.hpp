#pragma once

#include "destsim/core.hpp"
#include "destsim/measures.hpp"

#include <span>
#include <string>
#include <vector>

namespace destsim {

struct Recommendation {
  std::string destination;
  double score = 0.0;
  int rank = 0;  // 1-based

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// Mean of the similarity rows for the context destinations. Context
/// positions are set to -inf so they cannot be recommended back.
/// Throws std::invalid_argument on an empty context.
VectorX<double> fuse_rows(const SimilarityMatrix& s, std::span<const Index> context);

/// Same, addressing the context by destination code.
/// Throws domain_error naming the first unknown code.
VectorX<double> fuse_rows(const SimilarityMatrix& s,
                          std::span<const std::string> context_codes);

/// Highest k fused scores as ranked recommendations. Ties break on
/// ascending destination code; -inf entries (the context itself) are
/// skipped; fewer than k come back when the candidates run out.
std::vector<Recommendation> top_k(const VectorX<double>& fused,
                                  const std::vector<std::string>& dest_codes, int k);

/// fuse_rows + top_k in one call.
std::vector<Recommendation> recommend(const SimilarityMatrix& s,
                                      std::span<const std::string> context_codes, int k);

}  // namespace destsim
