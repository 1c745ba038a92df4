#include "destsim/interaction.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

namespace destsim {
namespace {

template <class T>
std::optional<Index> sorted_lookup(const std::vector<std::string>& keys, const T& key) {
  auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) return std::nullopt;
  return static_cast<Index>(it - keys.begin());
}

}  // namespace

std::optional<Index> InteractionMatrix::user_index(std::string_view id) const {
  return sorted_lookup(user_ids_, id);
}

std::optional<Index> InteractionMatrix::dest_index(std::string_view code) const {
  return sorted_lookup(dest_codes_, code);
}

InteractionMatrix InteractionMatrix::from_rows(std::vector<std::string> user_ids,
                                               std::vector<std::string> dest_codes,
                                               std::vector<std::vector<std::int32_t>> rows,
                                               std::string market,
                                               std::optional<TimeWindow> window) {
  if (user_ids.size() != rows.size()) {
    throw std::invalid_argument("from_rows: one row per user id required");
  }
  auto strictly_ascending = [](const std::vector<std::string>& v) {
    return std::adjacent_find(v.begin(), v.end(),
                              [](const auto& a, const auto& b) { return !(a < b); }) == v.end();
  };
  if (!strictly_ascending(user_ids)) {
    throw std::invalid_argument("from_rows: user ids must be strictly ascending");
  }
  if (!strictly_ascending(dest_codes)) {
    throw std::invalid_argument("from_rows: destination codes must be strictly ascending");
  }

  InteractionMatrix m;
  m.user_ids_ = std::move(user_ids);
  m.dest_codes_ = std::move(dest_codes);
  m.market_ = std::move(market);
  m.window_ = window;
  m.row_offsets_.reserve(rows.size() + 1);
  m.row_offsets_.push_back(0);
  const auto n = static_cast<std::int32_t>(m.dest_codes_.size());
  for (const auto& row : rows) {
    if (row.empty()) throw std::invalid_argument("from_rows: every user needs >= 1 entry");
    for (size_t i = 0; i < row.size(); ++i) {
      if (row[i] < 0 || row[i] >= n) throw std::invalid_argument("from_rows: index out of range");
      if (i > 0 && row[i] <= row[i - 1]) {
        throw std::invalid_argument("from_rows: row entries must be sorted and unique");
      }
    }
    m.entries_.insert(m.entries_.end(), row.begin(), row.end());
    m.row_offsets_.push_back(static_cast<std::int64_t>(m.entries_.size()));
  }
  return m;
}

InteractionMatrix build_matrix(std::span<const SearchRecord> records,
                               const BuildOptions& options) {
  if (records.empty()) {
    throw io_error("empty window: no records to build an interaction matrix from");
  }
  const std::string& market = records.front().market;
  for (const auto& r : records) {
    if (r.market != market) {
      throw std::invalid_argument("build_matrix: records span multiple markets (" + market +
                                  " and " + r.market + "); partition first");
    }
  }

  // Intern destination codes, gather per-user interim index lists.
  std::vector<std::string> codes;
  std::unordered_map<std::string_view, std::int32_t> code_ids;
  std::unordered_map<std::string_view, std::vector<std::int32_t>> by_user;
  code_ids.reserve(1024);
  for (const auto& r : records) {
    // Key views point at the caller's record strings, which outlive this call.
    auto [it, inserted] = code_ids.try_emplace(r.destination,
                                               static_cast<std::int32_t>(codes.size()));
    if (inserted) codes.push_back(r.destination);
    by_user[r.user_id].push_back(it->second);
  }

  // Drop presumed bots, then count supports on the survivors.
  std::vector<std::pair<std::string_view, std::vector<std::int32_t>>> users;
  users.reserve(by_user.size());
  std::vector<std::int64_t> support(codes.size(), 0);
  for (auto& [id, dests] : by_user) {
    std::sort(dests.begin(), dests.end());
    dests.erase(std::unique(dests.begin(), dests.end()), dests.end());
    if (static_cast<std::int64_t>(dests.size()) > options.bot_degree_threshold) continue;
    for (std::int32_t d : dests) ++support[static_cast<size_t>(d)];
    users.emplace_back(id, std::move(dests));
  }

  // Interim index -> final index, skipping under-supported destinations and
  // renumbering in sorted-code order.
  std::vector<std::int32_t> order(codes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
  std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
    return codes[static_cast<size_t>(a)] < codes[static_cast<size_t>(b)];
  });
  std::vector<std::int32_t> remap(codes.size(), -1);
  std::vector<std::string> final_codes;
  final_codes.reserve(codes.size());
  for (std::int32_t interim : order) {
    if (support[static_cast<size_t>(interim)] < options.min_support) continue;
    remap[static_cast<size_t>(interim)] = static_cast<std::int32_t>(final_codes.size());
    final_codes.push_back(codes[static_cast<size_t>(interim)]);
  }

  std::sort(users.begin(), users.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> user_ids;
  std::vector<std::vector<std::int32_t>> rows;
  user_ids.reserve(users.size());
  rows.reserve(users.size());
  for (auto& [id, dests] : users) {
    std::vector<std::int32_t> row;
    row.reserve(dests.size());
    for (std::int32_t d : dests) {
      if (std::int32_t f = remap[static_cast<size_t>(d)]; f >= 0) row.push_back(f);
    }
    if (row.empty()) continue;  // all of this user's destinations were filtered
    std::sort(row.begin(), row.end());
    user_ids.emplace_back(id);
    rows.push_back(std::move(row));
  }
  if (user_ids.empty()) {
    throw io_error("empty window: all records filtered out while building the matrix");
  }

  return InteractionMatrix::from_rows(std::move(user_ids), std::move(final_codes), std::move(rows),
                                      market, options.window);
}

}  // namespace destsim
