#include "rfcp/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rfcp/app/errors.hpp"

namespace rfcp::app {
namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const auto s = lower(v);
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

DataFormat parse_format(const std::string& key, const std::string& v) {
  const auto s = lower(v);
  if (s == "fasta") return DataFormat::Fasta;
  if (s == "csv") return DataFormat::Csv;
  if (s == "events") return DataFormat::Events;
  throw ConfigError(key + ": unknown format '" + v + "' (fasta, csv, events)");
}

ModelKind parse_model(const std::string& key, const std::string& v) {
  const auto s = lower(v);
  if (s == "multinomial_dirichlet") return ModelKind::MultinomialDirichlet;
  if (s == "gaussian_conjugate") return ModelKind::GaussianConjugate;
  if (s == "poisson_gamma") return ModelKind::PoissonGamma;
  if (s == "gmrf") return ModelKind::Gmrf;
  throw ConfigError(key + ": unknown model '" + v +
                    "' (multinomial_dirichlet, gaussian_conjugate, poisson_gamma, gmrf)");
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<json(const RunConfig&)> get;
};

#define RFCP_DOUBLE(key, field)                                                                    \
  KeySpec {                                                                                        \
    key, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_double(k, v); }, \
        [](const RunConfig& c) { return json(c.field); }                                           \
  }
#define RFCP_SIZE(key, field)                                                                      \
  KeySpec {                                                                                        \
    key,                                                                                           \
        [](RunConfig& c, const std::string& k, const std::string& v) {                             \
          c.field = static_cast<std::size_t>(parse_uint(k, v));                                    \
        },                                                                                         \
        [](const RunConfig& c) { return json(c.field); }                                           \
  }
#define RFCP_BOOL(key, field)                                                                      \
  KeySpec {                                                                                        \
    key, [](RunConfig& c, const std::string& k, const std::string& v) { c.field = parse_bool(k, v); }, \
        [](const RunConfig& c) { return json(c.field); }                                           \
  }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"data.path", [](RunConfig& c, const std::string&, const std::string& v) { c.data_path = v; },
       [](const RunConfig& c) { return json(c.data_path); }},
      {"data.format",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.data_format = parse_format(k, v); },
       [](const RunConfig& c) { return c.data_format ? json(to_string(*c.data_format)) : json(nullptr); }},
      {"model.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.model_kind = parse_model(k, v); },
       [](const RunConfig& c) { return c.model_kind ? json(to_string(*c.model_kind)) : json(nullptr); }},
      RFCP_DOUBLE("model.alpha", model.alpha),
      RFCP_DOUBLE("model.nig.mean", model.nig.mean),
      RFCP_DOUBLE("model.nig.kappa", model.nig.kappa),
      RFCP_DOUBLE("model.nig.shape", model.nig.shape),
      RFCP_DOUBLE("model.nig.rate", model.nig.rate),
      RFCP_DOUBLE("model.gamma.shape", model.gamma.shape),
      RFCP_DOUBLE("model.gamma.rate", model.gamma.rate),
      {"model.latent.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.model.latent.kind = gmrf::latent_kind_from_string(lower(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       },
       [](const RunConfig& c) { return json(gmrf::to_string(c.model.latent.kind)); }},
      RFCP_DOUBLE("model.latent.precision.shape", model.latent.precision.shape),
      RFCP_DOUBLE("model.latent.precision.rate", model.latent.precision.rate),
      {"model.latent.precision.parameterization",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto s = lower(v);
         if (s != "innovation" && s != "marginal") {
           throw ConfigError(k + ": expected innovation or marginal, got '" + v + "'");
         }
         c.model.latent.ar1_marginal_precision = s == "marginal";
       },
       [](const RunConfig& c) { return json(c.model.latent.ar1_marginal_precision ? "marginal" : "innovation"); }},
      RFCP_DOUBLE("model.latent.kappa.mean", model.latent.kappa.mean),
      RFCP_DOUBLE("model.latent.kappa.sd", model.latent.kappa.sd),
      RFCP_DOUBLE("model.latent.rw1_initial_sd", model.latent.rw1_initial_sd),
      {"model.obs.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.model.obs.kind = gmrf::obs_kind_from_string(lower(v));
         } catch (const std::invalid_argument& e) {
           throw ConfigError(k + ": " + e.what());
         }
       },
       [](const RunConfig& c) { return json(gmrf::to_string(c.model.obs.kind)); }},
      RFCP_DOUBLE("model.obs.precision.shape", model.obs.precision.shape),
      RFCP_DOUBLE("model.obs.precision.rate", model.obs.precision.rate),
      RFCP_BOOL("model.intercept.enabled", model.latent.intercept),
      {"model.intercept.mean",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.latent.intercept_prior.mean = parse_double(k, v);
         c.intercept_prior_set = true;
       },
       [](const RunConfig& c) { return json(effective_latent(c).intercept_prior.mean); }},
      {"model.intercept.sd",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.latent.intercept_prior.sd = parse_double(k, v);
         c.intercept_prior_set = true;
       },
       [](const RunConfig& c) { return json(effective_latent(c).intercept_prior.sd); }},
      RFCP_SIZE("model.grid.nodes", model.grid.nodes),
      RFCP_DOUBLE("model.grid.lower_quantile", model.grid.lower_quantile),
      RFCP_DOUBLE("model.grid.upper_quantile", model.grid.upper_quantile),
      RFCP_SIZE("model.min_segment_len", model.min_segment_len),
      RFCP_DOUBLE("model.newton.tolerance", model.newton.tolerance),
      RFCP_SIZE("model.newton.max_iterations", model.newton.max_iterations),
      RFCP_SIZE("grid.g", g),
      RFCP_SIZE("changepoints.max", max_k),
      {"changepoints.prior",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto s = lower(v);
         if (s != "uniform" && s != "poisson") {
           throw ConfigError(k + ": unknown prior '" + v + "' (uniform, poisson)");
         }
         c.k_prior = s;
       },
       [](const RunConfig& c) { return json(c.k_prior); }},
      RFCP_DOUBLE("changepoints.prior.mean", k_prior_mean),
      {"changepoints.report_k",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (lower(v) == "map") {
           c.report_k.reset();
         } else {
           c.report_k = static_cast<std::size_t>(parse_uint(k, v));
         }
       },
       [](const RunConfig& c) { return c.report_k ? json(*c.report_k) : json("map"); }},
      RFCP_BOOL("refine.enabled", refine),
      RFCP_SIZE("refine.max_sweeps", refine_max_sweeps),
      RFCP_SIZE("sampling.count", sampling_count),
      {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_uint(k, v); },
       [](const RunConfig& c) { return json(c.seed); }},
      {"preprocess.scale",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.scale = parse_bool(k, v); },
       [](const RunConfig& c) { return json(effective_scale(c)); }},
      RFCP_SIZE("run.workers", workers),
      {"output.path", [](RunConfig& c, const std::string&, const std::string& v) { c.output_path = v; },
       [](const RunConfig& c) { return json(c.output_path); }},
  };
  return table;
}

#undef RFCP_DOUBLE
#undef RFCP_SIZE
#undef RFCP_BOOL

const KeySpec& find_key(const std::string& key) {
  for (const auto& k : key_table()) {
    if (k.name == key) return k;
  }
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

std::string to_string(DataFormat f) {
  switch (f) {
    case DataFormat::Fasta: return "fasta";
    case DataFormat::Csv: return "csv";
    case DataFormat::Events: return "events";
  }
  return "unknown";
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::MultinomialDirichlet: return "multinomial_dirichlet";
    case ModelKind::GaussianConjugate: return "gaussian_conjugate";
    case ModelKind::PoissonGamma: return "poisson_gamma";
    case ModelKind::Gmrf: return "gmrf";
  }
  return "unknown";
}

bool effective_scale(const RunConfig& cfg) {
  if (cfg.scale) return *cfg.scale;
  return cfg.model_kind == ModelKind::Gmrf && cfg.model.obs.kind == gmrf::ObsKind::GaussianIdentity;
}

gmrf::LatentSpec effective_latent(const RunConfig& cfg) {
  gmrf::LatentSpec latent = cfg.model.latent;
  if (!cfg.intercept_prior_set && cfg.model.obs.kind == gmrf::ObsKind::SVZeroMean) {
    latent.intercept_prior = {0.0, 3.0};
  }
  return latent;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return keys;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, key, value);
}

RunConfig parse_config(std::istream& in, const std::string& source_name,
                       const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto where = source_name + ":" + std::to_string(lineno) + ": ";
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "missing key");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (!cfg.data_path.empty() && !base_dir.empty()) {
    std::filesystem::path p(cfg.data_path);
    if (p.is_relative()) cfg.data_path = (base_dir / p).lexically_normal().string();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  return parse_config(in, path.string(), path.parent_path());
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (cfg.data_path.empty()) fail("data.path is required");
  if (!cfg.data_format) fail("data.format is required");
  if (!cfg.model_kind) fail("model.kind is required");
  const bool symbols = *cfg.data_format == DataFormat::Fasta;
  if (symbols != (*cfg.model_kind == ModelKind::MultinomialDirichlet)) {
    fail("model.kind " + to_string(*cfg.model_kind) + " cannot be used with data.format " +
         to_string(*cfg.data_format));
  }
  if (cfg.g < 1) fail("grid.g must be at least 1");
  if (cfg.workers < 1) fail("run.workers must be at least 1");
  if (cfg.k_prior == "poisson" && !(cfg.k_prior_mean > 0.0)) fail("changepoints.prior.mean must be positive");
  if (cfg.report_k && *cfg.report_k > cfg.max_k) fail("changepoints.report_k exceeds changepoints.max");
  const auto& m = cfg.model;
  switch (*cfg.model_kind) {
    case ModelKind::MultinomialDirichlet:
      if (!(m.alpha > 0.0)) fail("model.alpha must be positive");
      break;
    case ModelKind::GaussianConjugate:
      if (!(m.nig.kappa > 0.0 && m.nig.shape > 0.0 && m.nig.rate > 0.0)) {
        fail("model.nig.kappa, model.nig.shape and model.nig.rate must be positive");
      }
      break;
    case ModelKind::PoissonGamma:
      if (!(m.gamma.shape > 0.0 && m.gamma.rate > 0.0)) {
        fail("model.gamma.shape and model.gamma.rate must be positive");
      }
      break;
    case ModelKind::Gmrf:
      try {
        effective_latent(cfg).validate();
        m.obs.validate();
      } catch (const std::invalid_argument& e) {
        fail(std::string("model: ") + e.what());
      }
      if (m.grid.nodes < 1) fail("model.grid.nodes must be at least 1");
      if (!(m.grid.lower_quantile > 0.0 && m.grid.lower_quantile < m.grid.upper_quantile &&
            m.grid.upper_quantile < 1.0)) {
        fail("model.grid quantiles must satisfy 0 < lower < upper < 1");
      }
      if (m.min_segment_len < 1) fail("model.min_segment_len must be at least 1");
      if (!(m.newton.tolerance > 0.0) || m.newton.max_iterations < 1) {
        fail("model.newton settings must be positive");
      }
      break;
  }
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  json out = json::object();
  for (const auto& k : key_table()) out[k.name] = k.get(cfg);
  return out;
}

RunConfig from_json(const nlohmann::json& echo) {
  RunConfig cfg;
  if (!echo.is_object()) throw ConfigError("configuration echo must be an object");
  for (const auto& [key, value] : echo.items()) {
    if (value.is_null()) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_unsigned()) {
      text = std::to_string(value.get<std::uint64_t>());
    } else if (value.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << value.get<double>();
      text = os.str();
    } else {
      throw ConfigError(key + ": unsupported value in configuration echo");
    }
    set_key(cfg, key, text);
  }
  return cfg;
}

void apply_environment(RunConfig& cfg) {
  const char* env = std::getenv("RFCP_WORKERS");
  if (env == nullptr || *env == '\0') return;
  const std::string v(env);
  const auto n = parse_uint("RFCP_WORKERS", v);
  if (n < 1) throw ConfigError("RFCP_WORKERS must be a positive integer");
  cfg.workers = static_cast<std::size_t>(n);
}

}  // namespace rfcp::app
