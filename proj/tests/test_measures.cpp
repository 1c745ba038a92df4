#include "destsim/measures.hpp"

#include "destsim/core.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "testutil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace destsim;

namespace {

constexpr double kTol = 1e-12;

double sigmoid_of_diff(double p, double v) { return 1.0 / (1.0 + std::exp(p - v)); }

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("ccs on the four-user example") {
  const auto s = ccs(testutil::worked_stats());
  CHECK(s.measure == Measure::ccs);
  CHECK(s.values(0, 1) == doctest::Approx(0.5).epsilon(kTol));    // AB = 2/4
  CHECK(s.values(0, 2) == doctest::Approx(0.25).epsilon(kTol));   // AC = 1/4
  CHECK(s.values(1, 2) == 0.0);                                    // BC = 0/4
  CHECK(s.market == "XX");
  CHECK(s.dest_codes == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("ccs_norm rescales each row by its off-diagonal maximum") {
  const auto s = ccs_norm(ccs(testutil::worked_stats()));
  CHECK(s.measure == Measure::ccs_norm);
  // Row A: max(0.5, 0.25) = 0.5 -> [., 1.0, 0.5]
  CHECK(s.values(0, 1) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(s.values(0, 2) == doctest::Approx(0.5).epsilon(kTol));
  // Row B: max(0.5, 0) = 0.5 -> [1.0, ., 0]
  CHECK(s.values(1, 0) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(s.values(1, 2) == 0.0);
  // Row C: max(0.25, 0) = 0.25 -> [1.0, 0, .]
  CHECK(s.values(2, 0) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(s.values(2, 1) == 0.0);
}

TEST_CASE("ccs_norm leaves an all-zero row untouched") {
  // Two users searching disjoint singletons: u1:{A}, u2:{B} with a third
  // destination nobody pairs with anything.
  const auto stats = cooccurrence(
      InteractionMatrix::from_rows({"u1", "u2"}, {"A", "B"}, {{0}, {1}}));
  const auto s = ccs_norm(ccs(stats));
  CHECK(s.values(0, 1) == 0.0);
  CHECK(s.values(1, 0) == 0.0);
}

TEST_CASE("pccs on the four-user example") {
  const auto stats = testutil::worked_stats();
  const auto s = pccs(ccs_norm(ccs(stats)), popularity(stats, 0.5));
  CHECK(s.measure == Measure::pccs);
  REQUIRE(s.w.has_value());
  CHECK(*s.w == 0.5);
  REQUIRE(s.popularity_denominator.has_value());
  CHECK(to_string(*s.popularity_denominator) == "n");

  // p_A = 0.5; row A of ccs_norm is [., 1.0, 0.5].
  CHECK(s.values(0, 1) == doctest::Approx(sigmoid_of_diff(0.5, 1.0)).epsilon(kTol));
  CHECK(s.values(0, 1) == doctest::Approx(0.6224593312018546).epsilon(kTol));
  CHECK(s.values(0, 2) == doctest::Approx(0.5).epsilon(kTol));  // sigmoid(0.5 - 0.5)

  // Zero normalized entries still pass through the sigmoid: row B's
  // p = 0.8333..., so its C entry becomes sigmoid(-0.8333...) != 0.
  CHECK(s.values(1, 2) == doctest::Approx(sigmoid_of_diff(1.0 - 0.5 / 3.0, 0.0)).epsilon(kTol));
  CHECK(s.values(1, 2) > 0.0);

  // The diagonal is re-zeroed after the transform.
  for (Index i = 0; i < s.n(); ++i) CHECK(s.values(i, i) == 0.0);
}

TEST_CASE("pearson on the four-user example") {
  const auto s = pearson(testutil::worked_stats());
  // AB: (4*2 - 3*2) / (sqrt(3*1) * sqrt(2*2)) = 2 / (2*sqrt(3)) = 1/sqrt(3).
  CHECK(s.values(0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(kTol));
  // AC: (4*1 - 3*2) / (sqrt(3) * 2) = -1/sqrt(3).
  CHECK(s.values(0, 2) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(kTol));
  // BC: (0 - 4) / (2*2) = -1: perfectly anti-correlated columns.
  CHECK(s.values(1, 2) == doctest::Approx(-1.0).epsilon(kTol));
}

TEST_CASE("cosine on the four-user example") {
  const auto s = cosine(testutil::worked_stats());
  CHECK(s.values(0, 1) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(kTol));
  CHECK(s.values(0, 2) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(kTol));
  CHECK(s.values(1, 2) == 0.0);
}

TEST_CASE("jaccard on the four-user example") {
  const auto s = jaccard(testutil::worked_stats());
  CHECK(s.values(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(kTol));  // 2/(3+2-2)
  CHECK(s.values(0, 2) == doctest::Approx(0.25).epsilon(kTol));        // 1/(3+2-1)
  CHECK(s.values(1, 2) == 0.0);
}

TEST_CASE("kulsinski on the four-user example") {
  const auto s = kulsinski(testutil::worked_stats());
  // AB: 2 / ((3-2)+(2-2)+4) = 0.4.
  CHECK(s.values(0, 1) == doctest::Approx(0.4).epsilon(kTol));
  // AC: 1 / ((3-1)+(2-1)+4) = 1/7.
  CHECK(s.values(0, 2) == doctest::Approx(1.0 / 7.0).epsilon(kTol));
  // BC: 0.
  CHECK(s.values(1, 2) == 0.0);
}

TEST_CASE("pair kernels give the expected self-similarity values") {
  // The matrix builders zero the diagonal by construction; the kernels
  // themselves must still be right for i == j inputs.
  CHECK(pair_pearson<double>(3, 3, 3, 4) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(pair_cosine<double>(3, 3, 3) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(pair_jaccard<double>(3, 3, 3) == doctest::Approx(1.0).epsilon(kTol));
  CHECK(pair_ccs<double>(3, 4) == doctest::Approx(0.75).epsilon(kTol));
  CHECK(pair_kulsinski<double>(3, 3, 3, 4) == doctest::Approx(0.75).epsilon(kTol));  // s/m
}

TEST_CASE("degenerate supports fall back to zero") {
  CHECK(pair_cosine<double>(0, 0, 5) == 0.0);
  CHECK(pair_cosine<double>(0, 5, 0) == 0.0);
  CHECK(pair_jaccard<double>(0, 0, 0) == 0.0);
  CHECK(pair_pearson<double>(0, 0, 3, 4) == 0.0);   // zero variance: support 0
  CHECK(pair_pearson<double>(3, 4, 3, 4) == 0.0);   // zero variance: support m
  CHECK(pair_kulsinski<double>(0, 0, 0, 4) == 0.0);
}

TEST_CASE("exact rational identities on the integer inputs") {
  // jaccard and ccs are single divisions of exact integers; the stored
  // double must be bit-identical to that quotient.
  for (int seed = 200; seed < 212; ++seed) {
    const auto rc = testutil::random_case(seed, testutil::density_for(seed));
    const auto stats = cooccurrence(rc.matrix);
    const auto sj = jaccard(stats);
    const auto sc = ccs(stats);
    for (Index i = 0; i < stats.n(); ++i) {
      for (Index j = 0; j < stats.n(); ++j) {
        if (i == j) continue;
        const auto c = static_cast<double>(stats.counts(i, j));
        const auto uni =
            static_cast<double>(stats.support(i) + stats.support(j) - stats.counts(i, j));
        if (uni > 0) CHECK(sj.values(i, j) == c / uni);
        CHECK(sc.values(i, j) == c / static_cast<double>(stats.user_count));
      }
    }
  }
}

TEST_CASE("all seven measures match the dense brute-force oracle") {
  for (int seed = 300; seed < 330; ++seed) {
    const auto rc = testutil::random_case(seed, testutil::density_for(seed));
    const auto stats = cooccurrence(rc.matrix);
    const auto pop = popularity(stats, 0.5);
    const int n = rc.dense.n();

    const auto check_matrix = [&](const SimilarityMatrix& s, auto&& oracle_fn) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double want = i == j ? 0.0 : oracle_fn(i, j);
          CAPTURE(seed);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(oracle::close(s.values(i, j), want));
        }
      }
    };

    check_matrix(pearson(stats), [&](int i, int j) { return oracle::pearson(rc.dense, i, j); });
    check_matrix(cosine(stats), [&](int i, int j) { return oracle::cosine(rc.dense, i, j); });
    check_matrix(jaccard(stats), [&](int i, int j) { return oracle::jaccard(rc.dense, i, j); });
    check_matrix(kulsinski(stats),
                 [&](int i, int j) { return oracle::kulsinski(rc.dense, i, j); });
    check_matrix(ccs(stats), [&](int i, int j) { return oracle::ccs(rc.dense, i, j); });
    check_matrix(ccs_norm(ccs(stats)),
                 [&](int i, int j) { return oracle::ccs_norm(rc.dense, i, j); });
    check_matrix(pccs(ccs_norm(ccs(stats)), pop),
                 [&](int i, int j) { return oracle::pccs(rc.dense, i, j, 0.5); });
  }
}

TEST_CASE("symmetric measures are exactly symmetric") {
  for (int seed = 400; seed < 406; ++seed) {
    const auto rc = testutil::random_case(seed, 0.3);
    const auto stats = cooccurrence(rc.matrix);
    for (const auto& s : {pearson(stats), cosine(stats), jaccard(stats), kulsinski(stats),
                          ccs(stats)}) {
      for (Index i = 0; i < s.n(); ++i) {
        for (Index j = 0; j < s.n(); ++j) {
          CHECK(s.values(i, j) == s.values(j, i));  // bitwise: same kernel call
        }
      }
    }
  }
}

TEST_CASE("diagonals are zero for every measure") {
  const auto rc = testutil::random_case(11, 0.4);
  const auto stats = cooccurrence(rc.matrix);
  const auto pop = popularity(stats, 0.3);
  for (Measure m : kAllMeasures) {
    const auto s = compute(m, stats, pop);
    for (Index i = 0; i < s.n(); ++i) CHECK(s.values(i, i) == 0.0);
  }
}

TEST_CASE("value ranges hold on random data") {
  const auto rc = testutil::random_case(12, 0.35);
  const auto stats = cooccurrence(rc.matrix);
  const auto pop = popularity(stats, 0.7);
  const auto in_01 = [](double v) { return v >= 0.0 && v <= 1.0; };

  const auto sp = pearson(stats);
  for (Index i = 0; i < sp.n(); ++i) {
    for (Index j = 0; j < sp.n(); ++j) {
      CHECK(sp.values(i, j) >= -1.0 - 1e-15);
      CHECK(sp.values(i, j) <= 1.0 + 1e-15);
    }
  }
  for (Measure m : {Measure::cosine, Measure::jaccard, Measure::kulsinski, Measure::ccs,
                    Measure::ccs_norm}) {
    const auto s = compute(m, stats, pop);
    for (Index i = 0; i < s.n(); ++i) {
      for (Index j = 0; j < s.n(); ++j) CHECK(in_01(s.values(i, j)));
    }
  }
  const auto spccs = compute(Measure::pccs, stats, pop);
  for (Index i = 0; i < spccs.n(); ++i) {
    for (Index j = 0; j < spccs.n(); ++j) {
      if (i == j) continue;
      CHECK(spccs.values(i, j) > 0.0);  // sigmoid never reaches 0 or 1
      CHECK(spccs.values(i, j) < 1.0);
    }
  }
}

TEST_CASE("normalization and the sigmoid preserve within-row order") {
  for (int seed = 500; seed < 512; ++seed) {
    const auto rc = testutil::random_case(seed, testutil::density_for(seed));
    const auto stats = cooccurrence(rc.matrix);
    const auto base = ccs(stats);
    const auto norm = ccs_norm(base);
    const auto sig = pccs(norm, popularity(stats, 0.5));
    for (Index i = 0; i < base.n(); ++i) {
      for (Index j = 0; j < base.n(); ++j) {
        for (Index l = 0; l < base.n(); ++l) {
          if (i == j || i == l || j == l) continue;
          if (base.values(i, j) < base.values(i, l)) {
            CHECK(norm.values(i, j) <= norm.values(i, l));
            CHECK(sig.values(i, j) < sig.values(i, l));
          }
          if (base.values(i, j) == base.values(i, l)) {
            CHECK(norm.values(i, j) == norm.values(i, l));
            CHECK(sig.values(i, j) == sig.values(i, l));
          }
        }
      }
    }
  }
}

TEST_CASE("raising w lowers every off-diagonal pccs value") {
  const auto rc = testutil::random_case(13, 0.4);
  const auto stats = cooccurrence(rc.matrix);
  const auto norm = ccs_norm(ccs(stats));
  const auto lo = pccs(norm, popularity(stats, 0.1));
  const auto hi = pccs(norm, popularity(stats, 0.5));
  // Larger w shrinks every p_i (all ranks positive), which raises the
  // sigmoid: hi(w=0.5) must exceed lo(w=0.1) strictly off the diagonal.
  for (Index i = 0; i < lo.n(); ++i) {
    for (Index j = 0; j < lo.n(); ++j) {
      if (i == j) continue;
      CHECK(hi.values(i, j) > lo.values(i, j));
    }
  }
}

TEST_CASE("w = 0 turns pccs into a plain sigmoid shift") {
  const auto stats = testutil::worked_stats();
  const auto s = pccs(ccs_norm(ccs(stats)), popularity(stats, 0.0));
  // p_i = 1 everywhere, so entries with normalized value 1 map to
  // sigmoid(0) = 0.5 exactly.
  CHECK(s.values(0, 1) == doctest::Approx(0.5).epsilon(kTol));
  CHECK(s.values(1, 0) == doctest::Approx(0.5).epsilon(kTol));
}

TEST_CASE("pipeline preconditions are enforced") {
  const auto stats = testutil::worked_stats();
  const auto base = ccs(stats);
  const auto norm = ccs_norm(base);
  const auto pop = popularity(stats, 0.5);

  CHECK_THROWS_AS(ccs_norm(norm), std::invalid_argument);       // already normalized
  CHECK_THROWS_AS(ccs_norm(cosine(stats)), std::invalid_argument);
  CHECK_THROWS_AS(pccs(base, pop), std::invalid_argument);      // not normalized yet
  CHECK_THROWS_AS(pccs(norm, popularity(cooccurrence(InteractionMatrix::from_rows(
                                            {"u1"}, {"A"}, {{0}})),
                                        0.5)),
                  std::invalid_argument);                        // size mismatch
  CHECK_THROWS_AS(compute(Measure::pccs, stats), std::invalid_argument);  // no popularity
}

TEST_CASE("compute dispatch matches the direct builders") {
  const auto stats = testutil::worked_stats();
  const auto pop = popularity(stats, 0.5);
  CHECK(compute(Measure::pearson, stats).values == pearson(stats).values);
  CHECK(compute(Measure::cosine, stats).values == cosine(stats).values);
  CHECK(compute(Measure::jaccard, stats).values == jaccard(stats).values);
  CHECK(compute(Measure::kulsinski, stats).values == kulsinski(stats).values);
  CHECK(compute(Measure::ccs, stats).values == ccs(stats).values);
  CHECK(compute(Measure::ccs_norm, stats).values == ccs_norm(ccs(stats)).values);
  CHECK(compute(Measure::pccs, stats, pop).values == pccs(ccs_norm(ccs(stats)), pop).values);
}

TEST_CASE("measure tags round-trip and reject unknowns") {
  for (Measure m : kAllMeasures) CHECK(parse_measure(to_string(m)) == m);
  CHECK_THROWS_AS(parse_measure("euclidean"), domain_error);
  CHECK_THROWS_AS(parse_measure(""), domain_error);
  CHECK_THROWS_AS(parse_measure("CCS"), domain_error);  // tags are lowercase
}

TEST_CASE("dest_index looks up codes on the similarity matrix") {
  const auto s = ccs(testutil::worked_stats());
  CHECK(s.dest_index("A") == Index{0});
  CHECK(s.dest_index("C") == Index{2});
  CHECK(!s.dest_index("Q").has_value());
}

}  // TEST_SUITE
