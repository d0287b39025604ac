// rfcp: changepoint detection with exact filtering recursions on a reduced grid.
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rfcp/app/config.hpp"
#include "rfcp/app/errors.hpp"
#include "rfcp/app/ingest.hpp"
#include "rfcp/app/run.hpp"
#include "rfcp/simulate.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace rfcp;

void emit(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    app::write_document(doc, path);
  }
}

// One option per configuration key, so any setting can be given on the
// command line as --<key> <value>.
struct KeyFlags {
  std::map<std::string, std::string> values;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    for (const auto& key : app::config_keys()) {
      cmd->add_option("--" + key, values[key], "configuration key " + key);
    }
    cmd->add_option("--set", sets, "key=value override (repeatable)");
  }

  void apply(CLI::App* cmd, app::RunConfig& cfg) const {
    for (const auto& [key, value] : values) {
      if (cmd->count("--" + key) > 0) app::set_key(cfg, key, value);
    }
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw app::ConfigError("--set expects key=value, got '" + kv + "'");
      app::set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  }
};

app::RunConfig resolve(const std::string& config_path, CLI::App* cmd, const KeyFlags& flags) {
  app::RunConfig cfg = config_path.empty() ? app::RunConfig{} : app::load_config(config_path);
  app::apply_environment(cfg);
  flags.apply(cmd, cfg);
  app::validate(cfg);
  return cfg;
}

json series_summary(const app::Series& s) {
  json out = {{"n", s.size()}, {"format", app::to_string(s.format)}, {"convention", s.convention}};
  if (s.format == app::DataFormat::Fasta) {
    std::array<std::size_t, 4> counts{};
    for (auto c : s.symbols) ++counts[c];
    out["counts"] = {{"A", counts[0]}, {"C", counts[1]}, {"G", counts[2]}, {"T", counts[3]}};
    return out;
  }
  const auto n = static_cast<double>(s.values.size());
  const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : s.values) ss += (v - mean) * (v - mean);
  out["mean"] = mean;
  out["sd"] = s.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  out["min"] = *std::min_element(s.values.begin(), s.values.end());
  out["max"] = *std::max_element(s.values.begin(), s.values.end());
  if (s.format == app::DataFormat::Events) {
    out["first_date"] = s.weekly.first_date;
    out["last_date"] = s.weekly.last_date;
    out["events"] = s.weekly.events;
  }
  return out;
}

void write_series(const std::vector<double>& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw app::ConfigError("cannot write '" + path + "'");
  out.precision(17);
  for (double x : v) out << x << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Bayesian multiple changepoint detection with reduced filtering recursions"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", app::kToolVersion);

  auto* ingest_cmd = cli.add_subcommand("ingest-check", "Read a data file and summarise it");
  std::string ingest_path;
  std::string ingest_format;
  ingest_cmd->add_option("--data.path", ingest_path, "data file")->required();
  ingest_cmd->add_option("--data.format", ingest_format, "fasta, csv or events")->required();

  auto* detect_cmd = cli.add_subcommand("detect", "Run a changepoint analysis");
  std::string detect_config;
  KeyFlags detect_flags;
  detect_cmd->add_option("-c,--config", detect_config, "configuration file");
  detect_flags.attach(detect_cmd);

  auto* bf_cmd = cli.add_subcommand("bayes-factor", "Compare two models on the same data");
  std::string bf_a;
  std::string bf_b;
  std::vector<std::size_t> bf_k;
  std::string bf_out;
  bf_cmd->add_option("--config-a", bf_a, "numerator model configuration")->required();
  bf_cmd->add_option("--config-b", bf_b, "denominator model configuration")->required();
  bf_cmd->add_option("-k,--k", bf_k, "numbers of changepoints")->required();
  bf_cmd->add_option("-o,--output", bf_out, "report path (default stdout)");

  auto* sim_cmd = cli.add_subcommand("simulate", "Generate a synthetic series");
  std::string sim_kind = "sv";
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  std::string sim_latent;
  std::string sim_meta;
  std::vector<double> sim_means;
  std::vector<double> sim_sds;
  std::vector<std::size_t> sim_lengths;
  std::size_t sim_n = 1000;
  double sim_alpha = 0.0;
  double sim_phi = 0.9;
  double sim_sigma = 0.1;
  sim_cmd->add_option("--kind", sim_kind, "gaussian, sv or poisson-ar1")
      ->check(CLI::IsMember({"gaussian", "sv", "poisson-ar1"}));
  sim_cmd->add_option("--seed", sim_seed, "generator seed");
  sim_cmd->add_option("-o,--output", sim_out, "series path, one value per line")->required();
  sim_cmd->add_option("--latent-output", sim_latent, "latent series path (sv, poisson-ar1)");
  sim_cmd->add_option("--meta", sim_meta, "metadata path (default stdout)");
  sim_cmd->add_option("--means", sim_means, "segment means (gaussian)");
  sim_cmd->add_option("--sds", sim_sds, "segment sds (gaussian)");
  sim_cmd->add_option("--lengths", sim_lengths, "segment lengths (gaussian)");
  sim_cmd->add_option("--n", sim_n, "length (poisson-ar1)");
  sim_cmd->add_option("--alpha", sim_alpha, "log-rate intercept (poisson-ar1)");
  sim_cmd->add_option("--phi", sim_phi, "AR(1) persistence (poisson-ar1)");
  sim_cmd->add_option("--sigma-x", sim_sigma, "AR(1) innovation sd (poisson-ar1)");

  auto* refine_cmd = cli.add_subcommand("refine", "Re-run refinement on an existing result");
  std::string refine_in;
  std::string refine_out;
  std::size_t refine_sweeps = 0;
  refine_cmd->add_option("--result", refine_in, "result document")->required();
  refine_cmd->add_option("--refine.max_sweeps", refine_sweeps, "maximum sweeps");
  refine_cmd->add_option("-o,--output", refine_out, "updated document path (default stdout)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::kExitConfig;
  }

  try {
    if (*ingest_cmd) {
      app::RunConfig cfg;
      app::set_key(cfg, "data.format", ingest_format);
      emit(series_summary(app::ingest(ingest_path, *cfg.data_format)), "");
    } else if (*detect_cmd) {
      const auto cfg = resolve(detect_config, detect_cmd, detect_flags);
      const auto res = app::run_analysis(cfg);
      if (cfg.output_path.empty()) emit(res.document, "");
    } else if (*bf_cmd) {
      auto a = app::load_config(bf_a);
      auto b = app::load_config(bf_b);
      app::apply_environment(a);
      app::apply_environment(b);
      emit(app::bayes_factor_report(a, b, bf_k), bf_out);
    } else if (*sim_cmd) {
      json meta = {{"kind", sim_kind}, {"seed", sim_seed}, {"rng", simulate::kRngAlgorithm}};
      std::vector<double> series;
      try {
        if (sim_kind == "gaussian") {
          series = simulate::gen_piecewise_gaussian(sim_means, sim_sds, sim_lengths, sim_seed);
          meta["means"] = sim_means;
          meta["sds"] = sim_sds;
          meta["lengths"] = sim_lengths;
        } else if (sim_kind == "sv") {
          const auto segs = simulate::default_sv_segments();
          const auto sv = simulate::gen_sv(segs, sim_seed);
          series = sv.y;
          json js = json::array();
          for (const auto& s : segs) {
            js.push_back({{"phi", s.phi}, {"two_log_beta", s.two_log_beta}, {"sigma_x", s.sigma_x},
                          {"length", s.length}});
          }
          meta["segments"] = js;
          if (!sim_latent.empty()) write_series(sv.log_variance, sim_latent);
        } else {
          series = simulate::gen_poisson_ar1(sim_n, sim_alpha, sim_phi, sim_sigma, sim_seed);
          meta["n"] = sim_n;
          meta["alpha"] = sim_alpha;
          meta["phi"] = sim_phi;
          meta["sigma_x"] = sim_sigma;
        }
      } catch (const std::invalid_argument& e) {
        throw app::ConfigError(e.what());
      }
      write_series(series, sim_out);
      meta["output"] = sim_out;
      meta["length"] = series.size();
      emit(meta, sim_meta);
    } else if (*refine_cmd) {
      std::ifstream in(refine_in);
      if (!in) throw app::ConfigError("cannot open result '" + refine_in + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw app::ConfigError(std::string("malformed result document: ") + e.what());
      }
      const auto sweeps = refine_cmd->count("--refine.max_sweeps") > 0
                              ? std::optional<std::size_t>(refine_sweeps)
                              : std::nullopt;
      emit(app::refine_existing(doc, sweeps), refine_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "rfcp: " << e.what() << '\n';
    return app::exit_code_for(e);
  }
  return app::kExitOk;
}
