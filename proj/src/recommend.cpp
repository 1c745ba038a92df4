#include "destsim/recommend.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace destsim {

VectorX<double> fuse_rows(const SimilarityMatrix& s, std::span<const Index> context) {
  if (context.empty()) {
    throw std::invalid_argument("fuse_rows: context is empty");
  }
  const Index n = s.n();
  VectorX<double> fused = VectorX<double>::Zero(n);
  for (const Index i : context) {
    if (i < 0 || i >= n) {
      throw std::out_of_range("fuse_rows: context index out of range");
    }
    fused += s.values.row(i).transpose();
  }
  fused /= static_cast<double>(context.size());
  for (const Index i : context) {
    fused(i) = -std::numeric_limits<double>::infinity();
  }
  return fused;
}

VectorX<double> fuse_rows(const SimilarityMatrix& s,
                          std::span<const std::string> context_codes) {
  std::vector<Index> context;
  context.reserve(context_codes.size());
  for (const auto& code : context_codes) {
    const auto idx = s.dest_index(code);
    if (!idx) {
      throw domain_error("unknown destination: " + code);
    }
    context.push_back(*idx);
  }
  return fuse_rows(s, context);
}

std::vector<Recommendation> top_k(const VectorX<double>& fused,
                                  const std::vector<std::string>& dest_codes, int k) {
  if (k < 1) {
    throw std::invalid_argument("top_k: k must be at least 1");
  }
  if (static_cast<Index>(dest_codes.size()) != fused.size()) {
    throw std::invalid_argument("top_k: code list does not match score vector");
  }
  constexpr double excluded = -std::numeric_limits<double>::infinity();
  std::vector<Index> order;
  order.reserve(static_cast<size_t>(fused.size()));
  for (Index i = 0; i < fused.size(); ++i) {
    if (fused(i) != excluded) order.push_back(i);
  }
  // Equal scores rank by ascending code so output is reproducible.
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (fused(a) != fused(b)) return fused(a) > fused(b);
    return dest_codes[static_cast<size_t>(a)] < dest_codes[static_cast<size_t>(b)];
  });
  const auto take = std::min<size_t>(static_cast<size_t>(k), order.size());
  std::vector<Recommendation> out;
  out.reserve(take);
  for (size_t r = 0; r < take; ++r) {
    const Index i = order[r];
    out.push_back({dest_codes[static_cast<size_t>(i)], fused(i), static_cast<int>(r) + 1});
  }
  return out;
}

std::vector<Recommendation> recommend(const SimilarityMatrix& s,
                                      std::span<const std::string> context_codes, int k) {
  return top_k(fuse_rows(s, context_codes), s.dest_codes, k);
}

}  // namespace destsim
