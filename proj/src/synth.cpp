#include "destsim/synth.hpp"

#include "destsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace destsim {

namespace {

int digits_for(std::int64_t max_value) {
  int d = 1;
  while (max_value >= 10) {
    max_value /= 10;
    ++d;
  }
  return std::max(d, 3);
}

std::string padded_id(char prefix, std::int64_t value, int width) {
  const std::string digits = std::to_string(value);
  std::string out(1, prefix);
  if (static_cast<size_t>(width) > digits.size()) {
    out.append(static_cast<size_t>(width) - digits.size(), '0');
  }
  return out += digits;
}

void validate(const SynthConfig& c) {
  if (c.n_users < 1) throw std::invalid_argument("synth: n_users must be positive");
  if (c.n_destinations < 1) {
    throw std::invalid_argument("synth: n_destinations must be positive");
  }
  if (c.n_clusters < 1 || c.n_clusters > c.n_destinations) {
    throw std::invalid_argument("synth: n_clusters must be in [1, n_destinations]");
  }
  if (!(c.zipf_exponent >= 0.0)) {
    throw std::invalid_argument("synth: zipf_exponent must be >= 0");
  }
  if (c.searches_lo < 1 || c.searches_lo > c.searches_hi) {
    throw std::invalid_argument("synth: searches_per_user range is invalid");
  }
  if (c.searches_hi > c.n_destinations) {
    throw std::invalid_argument("synth: searches_per_user upper bound exceeds n_destinations");
  }
  if (!(c.noise >= 0.0 && c.noise <= 1.0)) {
    throw std::invalid_argument("synth: noise must be in [0, 1]");
  }
  if (c.time_range.start >= c.time_range.end) {
    throw std::invalid_argument("synth: time_range must be a non-empty half-open interval");
  }
}

// Cumulative Zipf weights over the destination indices in `members`
// (weight of destination i is (i+1)^-exponent — popularity rank order is
// index order). Sampling is an upper_bound over the running sums.
std::vector<double> cumulative_weights(const std::vector<std::int64_t>& members,
                                       double exponent) {
  std::vector<double> cum;
  cum.reserve(members.size());
  double total = 0.0;
  for (const auto i : members) {
    total += std::pow(static_cast<double>(i + 1), -exponent);
    cum.push_back(total);
  }
  return cum;
}

std::int64_t sample_from(const std::vector<std::int64_t>& members,
                         const std::vector<double>& cum, Rng& rng) {
  const double u = rng.unit_real() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const auto pos = std::min<size_t>(static_cast<size_t>(it - cum.begin()), cum.size() - 1);
  return members[pos];
}

}  // namespace

std::string synth_dest_code(std::int64_t i, std::int64_t n_destinations) {
  return padded_id('D', i, digits_for(n_destinations - 1));
}

std::vector<SearchRecord> generate(const SynthConfig& config) {
  validate(config);

  const std::int64_t n = config.n_destinations;
  std::vector<std::int64_t> all(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  const auto global_cum = cumulative_weights(all, config.zipf_exponent);

  std::vector<std::vector<std::int64_t>> cluster_members(static_cast<size_t>(config.n_clusters));
  for (std::int64_t i = 0; i < n; ++i) {
    cluster_members[static_cast<size_t>(synth_cluster(i, config.n_clusters))].push_back(i);
  }
  std::vector<std::vector<double>> cluster_cum(cluster_members.size());
  for (size_t c = 0; c < cluster_members.size(); ++c) {
    cluster_cum[c] = cumulative_weights(cluster_members[c], config.zipf_exponent);
  }

  std::vector<std::string> codes(static_cast<size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    codes[static_cast<size_t>(i)] = synth_dest_code(i, n);
  }
  const int user_digits = digits_for(config.n_users - 1);

  std::vector<SearchRecord> records;
  records.reserve(static_cast<size_t>(config.n_users) *
                  static_cast<size_t>((config.searches_lo + config.searches_hi) / 2 + 1));

  const auto span = static_cast<std::uint64_t>(config.time_range.end - config.time_range.start);
  std::vector<char> seen(static_cast<size_t>(n), 0);

  for (std::int64_t u = 0; u < config.n_users; ++u) {
    Rng rng(hash_combine(config.seed, static_cast<std::uint64_t>(u)));

    const std::string user_id = padded_id('U', u, user_digits);

    const auto cluster =
        static_cast<size_t>(rng.bounded(static_cast<std::uint64_t>(config.n_clusters)));
    const auto want = config.searches_lo +
                      static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(
                          config.searches_hi - config.searches_lo + 1)));

    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::int64_t> chosen;
    chosen.reserve(static_cast<size_t>(want));

    // Rejection-sample distinct destinations. A cluster smaller than `want`
    // with noise near 0 can starve, so after a generous budget the remainder
    // is filled deterministically in popularity order.
    std::int64_t attempts_left = 64 * want + 256;
    while (static_cast<std::int64_t>(chosen.size()) < want && attempts_left-- > 0) {
      const bool from_cluster = rng.unit_real() >= config.noise;
      const std::int64_t i = from_cluster
                                 ? sample_from(cluster_members[cluster], cluster_cum[cluster], rng)
                                 : sample_from(all, global_cum, rng);
      if (!seen[static_cast<size_t>(i)]) {
        seen[static_cast<size_t>(i)] = 1;
        chosen.push_back(i);
      }
    }
    for (std::int64_t i = 0; static_cast<std::int64_t>(chosen.size()) < want; ++i) {
      if (!seen[static_cast<size_t>(i)]) {
        seen[static_cast<size_t>(i)] = 1;
        chosen.push_back(i);
      }
    }

    for (const auto i : chosen) {
      SearchRecord rec;
      rec.user_id = user_id;
      rec.destination = codes[static_cast<size_t>(i)];
      rec.market = config.market;
      rec.timestamp = config.time_range.start + static_cast<std::int64_t>(rng.bounded(span));
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace destsim
