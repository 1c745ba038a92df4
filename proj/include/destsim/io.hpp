#pragma once

#include "destsim/eval.hpp"
#include "destsim/interaction.hpp"
#include "destsim/measures.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace destsim {

struct SaveOptions {
  // Suppress the created_at sidecar field so output bytes depend only on
  // the inputs.
  bool deterministic = false;
};

/// Metadata travels next to the data file as `<name>.json` (appended, so
/// the pairing survives any data-file name).
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

/// Similarity matrix as CSV triplets `dest_i,dest_j,value` over destination
/// codes, one row per nonzero off-diagonal entry in row-major order, values
/// at full round-trip precision. The sidecar records measure, params, n,
/// market, window, and the destination index (zero rows would otherwise
/// leave their codes unrecoverable from the triplets).
void save_similarity(const SimilarityMatrix& s, const std::filesystem::path& csv_path,
                     const SaveOptions& options = {});
SimilarityMatrix load_similarity(const std::filesystem::path& csv_path);

/// Interaction matrix as CSV triplets `user_idx,dest_idx,1` with the index
/// maps, m, n, market, and window in the sidecar.
void save_interaction(const InteractionMatrix& mat, const std::filesystem::path& csv_path,
                      const SaveOptions& options = {});
InteractionMatrix load_interaction(const std::filesystem::path& csv_path);

/// One market's evaluation as JSON: shared k/seed plus one entry per
/// train/test period. Accuracy is null when a period had no eligible users.
void save_market_report(const std::string& market, const std::vector<EvalReport>& periods,
                        const std::filesystem::path& json_path,
                        const SaveOptions& options = {});

/// Accuracy table: one row per (market, period), one column per measure
/// variant, plus optional footer rows with mean accuracy, mean rank, and
/// delta vs the baseline.
void save_summary_csv(const std::vector<EvalReport>& reports,
                      const std::vector<MeasureSummary>& footers,
                      const std::filesystem::path& csv_path);

}  // namespace destsim
