#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfcp/conjugate_models.hpp"
#include "rfcp/gmrf/hyper_grid.hpp"
#include "rfcp/gmrf/laplace.hpp"
#include "rfcp/gmrf/specs.hpp"

namespace rfcp::app {

enum class DataFormat { Fasta, Csv, Events };
enum class ModelKind { MultinomialDirichlet, GaussianConjugate, PoissonGamma, Gmrf };

std::string to_string(DataFormat f);
std::string to_string(ModelKind k);

struct ModelConfig {
  ModelKind kind = ModelKind::Gmrf;
  double alpha = 1.0;
  NormalInverseGammaPrior nig{};
  GammaPrior gamma{};
  gmrf::LatentSpec latent{.intercept = true};
  gmrf::ObsSpec obs{};
  gmrf::HyperGridOptions grid{};
  std::size_t min_segment_len = 5;
  gmrf::NewtonOptions newton{};
};

/// Fully resolved analysis settings. Every field has a default; only the data
/// path and model kind must be supplied.
struct RunConfig {
  std::string data_path;
  std::optional<DataFormat> data_format;
  std::optional<ModelKind> model_kind;
  ModelConfig model{};
  std::size_t g = 1;
  std::size_t max_k = 10;
  std::string k_prior = "uniform";
  double k_prior_mean = 3.0;
  std::optional<std::size_t> report_k;  // empty: MAP k
  bool refine = true;
  std::size_t refine_max_sweeps = 10;
  std::size_t sampling_count = 0;
  std::uint64_t seed = 1;
  std::optional<bool> scale;        // empty: on for GMRF models with Gaussian observations
  bool intercept_prior_set = false;  // otherwise SV uses N(0, 3^2) for 2 log beta
  std::size_t workers = 1;
  std::string output_path;
};

/// Resolved scaling flag.
bool effective_scale(const RunConfig& cfg);
/// Latent specification with model-dependent defaults applied.
gmrf::LatentSpec effective_latent(const RunConfig& cfg);

/// Names of every recognised key, in echo order.
const std::vector<std::string>& config_keys();

/// Assigns one key; throws ConfigError naming the key on unknown keys or
/// unparsable values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines. '#' starts a comment. Relative data paths are
/// resolved against `base_dir`. Errors carry the source name and line number.
RunConfig parse_config(std::istream& in, const std::string& source_name,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Throws ConfigError unless the configuration is complete and consistent.
void validate(const RunConfig& cfg);

/// Flat key -> typed value map of every setting, defaults included.
nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Inverse of to_json for echoed configurations.
RunConfig from_json(const nlohmann::json& echo);

/// Applies RFCP_WORKERS when set to a positive integer.
void apply_environment(RunConfig& cfg);

}  // namespace rfcp::app
