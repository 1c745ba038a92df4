#pragma once

#include "destsim/ingest.hpp"
#include "destsim/time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace destsim {

/// Parameters for the synthetic search-log generator: destinations get a
/// Zipf popularity profile and a round-robin cluster assignment, users get a
/// latent cluster and search mostly inside it.
struct SynthConfig {
  std::int64_t n_users = 50000;
  std::int64_t n_destinations = 200;
  std::int64_t n_clusters = 10;
  double zipf_exponent = 1.0;     // popularity skew; 0 = uniform
  std::int64_t searches_lo = 2;   // distinct destinations per user,
  std::int64_t searches_hi = 6;   //   drawn uniformly from [lo, hi]
  double noise = 0.2;             // probability a draw ignores the user's cluster
  std::uint64_t seed = 0;
  std::string market = "XX";
  TimeWindow time_range{1586131200, 1591574400};  // 2020-04-06T00Z .. 2020-06-08T00Z
};

/// Destination code for index i: "D" + zero-padded i. Index order, code
/// order, and popularity order all coincide (index 0 is the most popular).
std::string synth_dest_code(std::int64_t i, std::int64_t n_destinations);

/// Cluster of destination i under the round-robin assignment, which puts
/// popular and unpopular destinations into every cluster.
inline std::int64_t synth_cluster(std::int64_t i, std::int64_t n_clusters) {
  return i % n_clusters;
}

/// Generate one search record per (user, distinct destination) draw.
/// Each user samples a latent cluster uniformly, a search count uniformly
/// from [lo, hi], and destinations Zipf-weighted from their cluster with
/// probability 1-noise (else from the global distribution), rejecting
/// repeats. Timestamps are uniform in time_range. Every user's draws come
/// from an independent stream keyed on (seed, user index), so the output is
/// byte-stable for a given config.
std::vector<SearchRecord> generate(const SynthConfig& config);

}  // namespace destsim
