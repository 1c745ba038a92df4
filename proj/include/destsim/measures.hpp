#pragma once

#include "destsim/cooccurrence.hpp"
#include "destsim/core.hpp"
#include "destsim/time.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace destsim {

/// Destination-destination similarity scores for one measure. The diagonal
/// is always zero. ccs_norm and pccs rows are individually rescaled, so
/// those two matrices need not be symmetric; the other five are.
template <class Scalar>
struct SimilarityMatrixT {
  Measure measure = Measure::ccs;
  MatrixX<Scalar> values;  // n x n, zero diagonal

  std::vector<std::string> dest_codes;
  std::string market;
  std::optional<TimeWindow> window;
  std::optional<Scalar> w;  // pccs only
  std::optional<PopularityDenominator> popularity_denominator;  // pccs only

  Index n() const { return values.rows(); }

  std::optional<Index> dest_index(std::string_view code) const {
    for (size_t i = 0; i < dest_codes.size(); ++i) {
      if (dest_codes[i] == code) return static_cast<Index>(i);
    }
    return std::nullopt;
  }
};

using SimilarityMatrix = SimilarityMatrixT<double>;

// Per-pair kernels over the integer ingredients: c users searched both i and
// j, si/sj searched each, m users total. Single rounding per value, so each
// entry is the correctly rounded rational.

template <class Scalar>
Scalar pair_ccs(std::int64_t c, std::int64_t m) {
  return static_cast<Scalar>(c) / static_cast<Scalar>(m);
}

template <class Scalar>
Scalar pair_cosine(std::int64_t c, std::int64_t si, std::int64_t sj) {
  if (si == 0 || sj == 0) return Scalar(0);
  return static_cast<Scalar>(c) /
         std::sqrt(static_cast<Scalar>(si) * static_cast<Scalar>(sj));
}

// Binary-column Pearson: zero-variance columns (support 0 or m) get 0 so the
// matrix stays total and rankable.
template <class Scalar>
Scalar pair_pearson(std::int64_t c, std::int64_t si, std::int64_t sj, std::int64_t m) {
  const std::int64_t vi = si * (m - si);
  const std::int64_t vj = sj * (m - sj);
  if (vi == 0 || vj == 0) return Scalar(0);
  const std::int64_t num = m * c - si * sj;
  return static_cast<Scalar>(num) /
         (std::sqrt(static_cast<Scalar>(vi)) * std::sqrt(static_cast<Scalar>(vj)));
}

template <class Scalar>
Scalar pair_jaccard(std::int64_t c, std::int64_t si, std::int64_t sj) {
  const std::int64_t uni = si + sj - c;
  if (uni == 0) return Scalar(0);  // both supports empty
  return static_cast<Scalar>(c) / static_cast<Scalar>(uni);
}

// One minus the conventional Kulsinski dissimilarity
// (c_TF + c_FT - c_TT + m) / (c_TF + c_FT + m).
template <class Scalar>
Scalar pair_kulsinski(std::int64_t c, std::int64_t si, std::int64_t sj, std::int64_t m) {
  const std::int64_t denom = (si - c) + (sj - c) + m;
  return static_cast<Scalar>(c) / static_cast<Scalar>(denom);
}

namespace detail {

template <class Scalar, class PairFn>
MatrixX<Scalar> symmetric_from_pairs(const CooccurrenceStats& stats, PairFn&& f) {
  const Index n = stats.n();
  MatrixX<Scalar> values = MatrixX<Scalar>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Scalar v = f(stats.counts(i, j), stats.support(i), stats.support(j));
      values(i, j) = v;
      values(j, i) = v;
    }
  }
  return values;
}

template <class Scalar>
SimilarityMatrixT<Scalar> tagged(const CooccurrenceStats& stats, Measure measure,
                                 MatrixX<Scalar> values) {
  SimilarityMatrixT<Scalar> s;
  s.measure = measure;
  s.values = std::move(values);
  s.dest_codes = stats.dest_codes;
  s.market = stats.market;
  s.window = stats.window;
  return s;
}

}  // namespace detail

/// Cluster-consensus similarity: co-search count over the user total.
template <class Scalar = double>
SimilarityMatrixT<Scalar> ccs(const CooccurrenceStats& stats) {
  return detail::tagged<Scalar>(
      stats, Measure::ccs,
      detail::symmetric_from_pairs<Scalar>(stats, [&stats](std::int64_t c, std::int64_t,
                                                           std::int64_t) {
        return pair_ccs<Scalar>(c, stats.user_count);
      }));
}

/// Each row rescaled by its off-diagonal maximum; all-zero rows stay zero.
/// Input must be a ccs matrix.
template <class Scalar>
SimilarityMatrixT<Scalar> ccs_norm(const SimilarityMatrixT<Scalar>& s_ccs) {
  if (s_ccs.measure != Measure::ccs) {
    throw std::invalid_argument("ccs_norm expects a ccs input matrix");
  }
  SimilarityMatrixT<Scalar> out = s_ccs;
  out.measure = Measure::ccs_norm;
  const Index n = out.n();
  for (Index i = 0; i < n; ++i) {
    Scalar row_max = Scalar(0);
    for (Index j = 0; j < n; ++j) {
      if (j != i) row_max = std::max(row_max, out.values(i, j));
    }
    if (row_max > Scalar(0)) {
      for (Index j = 0; j < n; ++j) {
        if (j != i) out.values(i, j) /= row_max;
      }
    }
  }
  return out;
}

/// Sigmoid of the normalized score shifted by the row's popularity score:
/// 1 / (1 + exp(p_i - v)). The diagonal is re-zeroed after the transform.
/// Input must be a ccs_norm matrix.
template <class Scalar>
SimilarityMatrixT<Scalar> pccs(const SimilarityMatrixT<Scalar>& s_norm,
                               const PopularityVector& pop) {
  if (s_norm.measure != Measure::ccs_norm) {
    throw std::invalid_argument("pccs expects a ccs_norm input matrix");
  }
  if (pop.n() != s_norm.n()) {
    throw std::invalid_argument("pccs: popularity vector size does not match matrix");
  }
  SimilarityMatrixT<Scalar> out = s_norm;
  out.measure = Measure::pccs;
  out.w = static_cast<Scalar>(pop.w);
  out.popularity_denominator = pop.denominator;
  const Index n = out.n();
  for (Index i = 0; i < n; ++i) {
    const auto p_i = static_cast<Scalar>(pop.p(i));
    for (Index j = 0; j < n; ++j) {
      out.values(i, j) = Scalar(1) / (Scalar(1) + std::exp(p_i - out.values(i, j)));
    }
    out.values(i, i) = Scalar(0);
  }
  return out;
}

template <class Scalar = double>
SimilarityMatrixT<Scalar> cosine(const CooccurrenceStats& stats) {
  return detail::tagged<Scalar>(
      stats, Measure::cosine,
      detail::symmetric_from_pairs<Scalar>(
          stats, [](std::int64_t c, std::int64_t si, std::int64_t sj) {
            return pair_cosine<Scalar>(c, si, sj);
          }));
}

template <class Scalar = double>
SimilarityMatrixT<Scalar> pearson(const CooccurrenceStats& stats) {
  return detail::tagged<Scalar>(
      stats, Measure::pearson,
      detail::symmetric_from_pairs<Scalar>(
          stats, [&stats](std::int64_t c, std::int64_t si, std::int64_t sj) {
            return pair_pearson<Scalar>(c, si, sj, stats.user_count);
          }));
}

template <class Scalar = double>
SimilarityMatrixT<Scalar> jaccard(const CooccurrenceStats& stats) {
  return detail::tagged<Scalar>(
      stats, Measure::jaccard,
      detail::symmetric_from_pairs<Scalar>(
          stats, [](std::int64_t c, std::int64_t si, std::int64_t sj) {
            return pair_jaccard<Scalar>(c, si, sj);
          }));
}

template <class Scalar = double>
SimilarityMatrixT<Scalar> kulsinski(const CooccurrenceStats& stats) {
  return detail::tagged<Scalar>(
      stats, Measure::kulsinski,
      detail::symmetric_from_pairs<Scalar>(
          stats, [&stats](std::int64_t c, std::int64_t si, std::int64_t sj) {
            return pair_kulsinski<Scalar>(c, si, sj, stats.user_count);
          }));
}

/// Dispatch by tag. pccs needs the popularity vector; everything else
/// ignores it.
template <class Scalar = double>
SimilarityMatrixT<Scalar> compute(Measure measure, const CooccurrenceStats& stats,
                                  const std::optional<PopularityVector>& pop = std::nullopt) {
  switch (measure) {
    case Measure::pearson:   return pearson<Scalar>(stats);
    case Measure::cosine:    return cosine<Scalar>(stats);
    case Measure::jaccard:   return jaccard<Scalar>(stats);
    case Measure::kulsinski: return kulsinski<Scalar>(stats);
    case Measure::ccs:       return ccs<Scalar>(stats);
    case Measure::ccs_norm:  return ccs_norm(ccs<Scalar>(stats));
    case Measure::pccs:
      if (!pop) throw std::invalid_argument("pccs requires a popularity vector");
      return pccs(ccs_norm(ccs<Scalar>(stats)), *pop);
  }
  throw std::invalid_argument("unhandled measure tag");
}

}  // namespace destsim
