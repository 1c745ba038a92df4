#pragma once

// Shared fixtures: the worked 4-user / 3-destination example and seeded
// random interaction data mirrored into both the library matrix and the
// dense oracle form.

#include "destsim/cooccurrence.hpp"
#include "destsim/interaction.hpp"
#include "destsim/rng.hpp"

#include "oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace testutil {

/// u1:{A,B} u2:{A,B} u3:{A,C} u4:{C} — supports A:3 B:2 C:2, counts AB=2
/// AC=1 BC=0, m=4.
inline destsim::InteractionMatrix worked_matrix() {
  return destsim::InteractionMatrix::from_rows(
      {"u1", "u2", "u3", "u4"}, {"A", "B", "C"}, {{0, 1}, {0, 1}, {0, 2}, {2}}, "XX");
}

inline destsim::CooccurrenceStats worked_stats() {
  return destsim::cooccurrence(worked_matrix());
}

struct RandomCase {
  oracle::Dense dense;
  destsim::InteractionMatrix matrix;
};

/// Seeded random binary matrix, 2..max_m users by 2..max_n destinations at
/// the given density. All-zero user rows are dropped from both views (users
/// without searches never enter a matrix); all-zero columns are kept.
inline RandomCase random_case(std::uint64_t seed, double density, int max_m = 30,
                              int max_n = 20) {
  destsim::Rng rng(seed);
  const int m = 2 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_m - 1)));
  const int n = 2 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(max_n - 1)));

  RandomCase out;
  for (int i = 0; i < n; ++i) {
    std::string code = "T";
    code += static_cast<char>('0' + i / 10);
    code += static_cast<char>('0' + i % 10);
    out.dense.codes.push_back(code);
  }

  std::vector<std::string> user_ids;
  std::vector<std::vector<std::int32_t>> rows;
  for (int u = 0; u < m; ++u) {
    std::vector<int> dense_row(static_cast<size_t>(n), 0);
    std::vector<std::int32_t> sparse_row;
    for (int i = 0; i < n; ++i) {
      if (rng.unit_real() < density) {
        dense_row[static_cast<size_t>(i)] = 1;
        sparse_row.push_back(i);
      }
    }
    if (sparse_row.empty()) continue;
    out.dense.rows.push_back(std::move(dense_row));
    std::string id = "u";
    id += static_cast<char>('0' + u / 10);
    id += static_cast<char>('0' + u % 10);
    user_ids.push_back(id);
    rows.push_back(std::move(sparse_row));
  }
  if (rows.empty()) {  // all draws empty; pin one entry so the matrix is legal
    out.dense.rows.push_back(std::vector<int>(static_cast<size_t>(n), 0));
    out.dense.rows.back()[0] = 1;
    user_ids.push_back("u00");
    rows.push_back({0});
  }

  out.matrix = destsim::InteractionMatrix::from_rows(std::move(user_ids),
                                                     out.dense.codes, std::move(rows), "XX");
  return out;
}

/// Cycles the three calibration densities.
inline double density_for(int index) {
  constexpr double kDensities[] = {0.05, 0.2, 0.5};
  return kDensities[index % 3];
}

}  // namespace testutil
