#include "destsim/cooccurrence.hpp"

#include <algorithm>
#include <numeric>
#include <thread>
#include <vector>

namespace destsim {
namespace {

// Upper-triangle accumulation for a contiguous block of users.
void accumulate_users(const InteractionMatrix& matrix, Index first, Index last,
                      CountMatrix& counts) {
  for (Index u = first; u < last; ++u) {
    const auto row = matrix.user_row(u);
    for (size_t a = 0; a < row.size(); ++a) {
      const Index i = row[a];
      counts(i, i) += 1;
      for (size_t b = a + 1; b < row.size(); ++b) {
        counts(i, row[b]) += 1;
      }
    }
  }
}

}  // namespace

CooccurrenceStats cooccurrence(const InteractionMatrix& matrix, int shards) {
  if (shards < 1) throw std::invalid_argument("cooccurrence: shards must be >= 1");
  const Index n = matrix.dest_count();
  const Index m = matrix.user_count();

  CountMatrix counts = CountMatrix::Zero(n, n);
  if (shards == 1 || m < 2 * shards) {
    accumulate_users(matrix, 0, m, counts);
  } else {
    std::vector<CountMatrix> partial(static_cast<size_t>(shards), CountMatrix::Zero(n, n));
    std::vector<std::thread> workers;
    const Index block = (m + shards - 1) / shards;
    for (int s = 0; s < shards; ++s) {
      const Index first = s * block;
      const Index last = std::min(m, first + block);
      workers.emplace_back([&matrix, first, last, &acc = partial[static_cast<size_t>(s)]] {
        if (first < last) accumulate_users(matrix, first, last, acc);
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& acc : partial) counts += acc;  // integer merge, order-independent
  }

  // Mirror the strict upper triangle; the diagonal already holds supports.
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) counts(j, i) = counts(i, j);
  }

  CooccurrenceStats stats;
  stats.support = counts.diagonal();
  stats.counts = std::move(counts);
  stats.user_count = m;
  stats.dest_codes = matrix.dest_codes();
  stats.market = matrix.market();
  stats.window = matrix.window();
  return stats;
}

PopularityVector popularity(const CooccurrenceStats& stats, double w,
                            PopularityDenominator denominator) {
  if (!(w >= 0.0 && w < 1.0)) {
    throw std::invalid_argument("popularity: w must lie in [0, 1)");
  }
  const Index n = stats.n();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const bool have_codes = static_cast<Index>(stats.dest_codes.size()) == n;
  std::sort(order.begin(), order.end(), [&stats, have_codes](Index a, Index b) {
    if (stats.support(a) != stats.support(b)) return stats.support(a) < stats.support(b);
    if (have_codes) {
      return stats.dest_codes[static_cast<size_t>(a)] < stats.dest_codes[static_cast<size_t>(b)];
    }
    return a < b;  // unlabeled stats: index order stands in for code order
  });

  PopularityVector pop;
  pop.rank.resize(n);
  pop.p.resize(n);
  pop.w = w;
  pop.denominator = denominator;
  const double denom = static_cast<double>(
      denominator == PopularityDenominator::destinations ? n : stats.user_count);
  for (Index pos = 0; pos < n; ++pos) {
    const Index i = order[static_cast<size_t>(pos)];
    const int b = static_cast<int>(pos) + 1;
    pop.rank(i) = b;
    pop.p(i) = 1.0 - w * static_cast<double>(b) / denom;
  }
  return pop;
}

}  // namespace destsim
