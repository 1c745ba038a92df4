#pragma once

#include "destsim/core.hpp"
#include "destsim/ingest.hpp"
#include "destsim/time.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace destsim {

struct BuildOptions {
  // Users with more distinct destinations in one window are presumed bots
  // and dropped; keeps the per-user pair kernel bounded.
  std::int64_t bot_degree_threshold = 1000;
  // Destinations searched by fewer users are dropped (1 keeps everything).
  std::int64_t min_support = 1;
  std::optional<TimeWindow> window;
};

/// Sparse binary user x destination matrix. Rows are users with at least one
/// entry; indices are assigned by sorted id/code, so the same records always
/// produce the same matrix. Storage is CSR: one sorted destination-index run
/// per user.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  /// Validating constructor used by file import and direct test setup.
  /// user_ids and dest_codes must be strictly ascending; each row sorted,
  /// unique, in range, non-empty.
  static InteractionMatrix from_rows(std::vector<std::string> user_ids,
                                     std::vector<std::string> dest_codes,
                                     std::vector<std::vector<std::int32_t>> rows,
                                     std::string market = {},
                                     std::optional<TimeWindow> window = std::nullopt);

  Index user_count() const { return static_cast<Index>(user_ids_.size()); }
  Index dest_count() const { return static_cast<Index>(dest_codes_.size()); }
  std::int64_t entry_count() const { return static_cast<std::int64_t>(entries_.size()); }

  std::span<const std::int32_t> user_row(Index u) const {
    return {entries_.data() + row_offsets_[static_cast<size_t>(u)],
            entries_.data() + row_offsets_[static_cast<size_t>(u) + 1]};
  }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& dest_codes() const { return dest_codes_; }

  std::optional<Index> user_index(std::string_view id) const;
  std::optional<Index> dest_index(std::string_view code) const;

  const std::string& market() const { return market_; }
  const std::optional<TimeWindow>& window() const { return window_; }

 private:
  std::vector<std::string> user_ids_;    // sorted ascending
  std::vector<std::string> dest_codes_;  // sorted ascending
  std::vector<std::int64_t> row_offsets_;
  std::vector<std::int32_t> entries_;
  std::string market_;
  std::optional<TimeWindow> window_;
};

/// Builds the matrix from deduped records of a single market. Throws
/// io_error("empty window...") when no records survive.
InteractionMatrix build_matrix(std::span<const SearchRecord> records,
                               const BuildOptions& options = {});

}  // namespace destsim
