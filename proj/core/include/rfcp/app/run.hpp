#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfcp/app/config.hpp"
#include "rfcp/app/ingest.hpp"
#include "rfcp/log_weight.hpp"
#include "rfcp/segment_model.hpp"

namespace rfcp::app {

inline constexpr const char* kToolVersion = "0.1.0";

struct PreparedData {
  Series series;
  std::vector<double> values;  // after optional scaling
  double scale_factor = 1.0;
};

/// Applies the scaling flag: numeric series are divided by their sample sd.
PreparedData prepare(const RunConfig& cfg, Series series);

std::unique_ptr<SegmentModel> build_model(const RunConfig& cfg, const PreparedData& data);

struct AnalysisResult {
  nlohmann::ordered_json document;
  std::vector<LogWeight> log_marginals;  // k = 0..K
  std::vector<double> posterior;
  std::size_t map_k = 0;
  std::size_t report_k = 0;
  std::vector<std::size_t> grid_times;
  std::vector<std::size_t> refined_times;
};

/// Ingest, fill the segment table, run the recursions for k = 0..K, locate and
/// refine the changepoints, optionally sample, and assemble the result
/// document. On failure the partial document (status "error") is written to
/// cfg.output_path when set, then the exception propagates.
AnalysisResult run_analysis(const RunConfig& cfg);
AnalysisResult run_analysis(const RunConfig& cfg, const Series& series);

/// Re-runs refinement from the grid positions stored in a result document.
nlohmann::ordered_json refine_existing(const nlohmann::ordered_json& document,
                                       std::optional<std::size_t> max_sweeps = std::nullopt);

/// Log marginals of two models on the same data, grid and prior on k, and
/// their Bayes factors B_k = p_a(y | k) / p_b(y | k).
nlohmann::ordered_json bayes_factor_report(const RunConfig& a, const RunConfig& b,
                                           const std::vector<std::size_t>& ks);

/// Serialises with two-space indentation and a trailing newline.
void write_document(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

/// Maps an exception to the process exit code.
int exit_code_for(const std::exception& e);

}  // namespace rfcp::app
