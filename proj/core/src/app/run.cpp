#include "rfcp/app/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "rfcp/app/errors.hpp"
#include "rfcp/changepoint_prior.hpp"
#include "rfcp/conjugate_models.hpp"
#include "rfcp/gmrf/gmrf_model.hpp"
#include "rfcp/grid.hpp"
#include "rfcp/recursions.hpp"
#include "rfcp/segment_table.hpp"
#include "rfcp/simulate.hpp"

namespace rfcp::app {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

KPrior make_k_prior(const RunConfig& cfg) {
  return cfg.k_prior == "poisson" ? KPrior::poisson(cfg.k_prior_mean, cfg.max_k)
                                  : KPrior::uniform(cfg.max_k);
}

json hyper_json(const gmrf::HyperPoint& h, const gmrf::ObsSpec& obs, const gmrf::LatentSpec& latent) {
  json out = json::object();
  out["latent_precision"] = h.latent_precision;
  if (latent.kind == gmrf::LatentKind::AR1) out["phi"] = h.phi;
  if (obs.kind == gmrf::ObsKind::GaussianIdentity) out["obs_precision"] = h.obs_precision;
  return out;
}

json hyper_grid_json(const gmrf::HyperGrid& grid) {
  json dims = json::array();
  for (const auto& d : grid.dimensions()) {
    dims.push_back({{"role", gmrf::to_string(d.role)}, {"nodes", d.nodes}});
  }
  return {{"size", grid.size()}, {"dimensions", dims}};
}

// Segment summaries between consecutive changepoints (times in (0, n)).
json segments_json(const SegmentModel& model, const std::vector<std::size_t>& times,
                   std::vector<double>* linear_predictor) {
  json out = json::array();
  if (const auto* g = dynamic_cast<const gmrf::GmrfSegmentModel*>(&model)) {
    const auto fit = gmrf::latent_field_mode_given_changepoints(*g, times);
    for (const auto& s : fit.segments) {
      json seg = {{"start", s.start}, {"end", s.end}, {"log_marginal", finite_or_null(s.log_marginal)}};
      seg["hyper_max"] = hyper_json(s.hyper, g->obs(), g->latent());
      if (g->latent().intercept) seg["intercept"] = s.intercept;
      out.push_back(std::move(seg));
    }
    if (linear_predictor != nullptr) *linear_predictor = fit.linear_predictor;
    return out;
  }
  std::size_t start = 1;
  auto add = [&](std::size_t end) {
    out.push_back({{"start", start}, {"end", end}, {"log_marginal", finite_or_null(model.log_marginal(start, end))}});
    start = end + 1;
  };
  for (auto t : times) add(t);
  add(model.size());
  return out;
}

void attach_model_diagnostics(json& doc, const SegmentModel& model) {
  if (const auto* g = dynamic_cast<const gmrf::GmrfSegmentModel*>(&model)) {
    doc["table"]["failed_nodes"] = g->failed_node_count();
    doc["table"]["failed_segments"] = g->failed_segment_count();
    doc["table"]["diagnostics"] = g->diagnostics();
  }
}

struct Stage {
  json& doc;
  const char* name;
  Clock::time_point t0 = Clock::now();
  ~Stage() { doc["timings"][name] = seconds_since(t0); }
};

AnalysisResult analyse(const RunConfig& cfg, const Series& series, json& doc) {
  AnalysisResult res;

  auto data = [&] {
    Stage st{doc, "prepare"};
    return prepare(cfg, series);
  }();
  doc["data"] = {{"n", series.size()},
                 {"format", to_string(series.format)},
                 {"convention", series.convention},
                 {"scale_factor", data.scale_factor}};
  if (series.format == DataFormat::Events) {
    doc["data"]["first_date"] = series.weekly.first_date;
    doc["data"]["last_date"] = series.weekly.last_date;
    doc["data"]["events"] = series.weekly.events;
  }

  std::unique_ptr<SegmentModel> model;
  try {
    model = build_model(cfg, data);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("data incompatible with model: ") + e.what());
  }
  if (const auto* g = dynamic_cast<const gmrf::GmrfSegmentModel*>(model.get())) {
    doc["hyper_grid"] = hyper_grid_json(g->grid());
  }

  std::optional<ReducedGrid> grid;
  try {
    grid.emplace(model->size(), cfg.g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid.g: ") + e.what());
  }
  doc["grid"] = {{"g", cfg.g},
                 {"size", grid->size()},
                 {"pair_count", grid->pair_count()},
                 {"reported_evaluation_count", grid->reported_evaluation_count()}};

  std::optional<SegmentTable> table;
  {
    Stage st{doc, "table_fill"};
    table.emplace(SegmentTable::fill(*model, *grid, cfg.workers));
  }
  doc["table"] = {{"model", model->name()},
                  {"entries", table->entry_count()},
                  {"failed_entries", table->failed_entries()}};
  attach_model_diagnostics(doc, *model);

  const KPrior k_prior = make_k_prior(cfg);
  {
    Stage st{doc, "recursions"};
    const auto b = backward_recursions(*table, cfg.max_k);
    for (std::size_t k = 0; k <= cfg.max_k; ++k) res.log_marginals.push_back(log_marginal_given_k(b, *table, k));
    for (auto v : res.log_marginals) {
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
        throw NumericalError("a log marginal is not a number; rescale the data (preprocess.scale)");
      }
    }
    try {
      res.posterior = posterior_over_k(res.log_marginals, k_prior);
    } catch (const std::domain_error& e) {
      throw NumericalError(e.what());
    }
    res.map_k = static_cast<std::size_t>(
        std::max_element(res.posterior.begin(), res.posterior.end()) - res.posterior.begin());
    res.report_k = cfg.report_k.value_or(res.map_k);
    if (res.report_k > 0 && !std::isfinite(res.log_marginals[res.report_k])) {
      throw NumericalError("k=" + std::to_string(res.report_k) + " has zero marginal likelihood");
    }

    json lm = json::array();
    for (auto v : res.log_marginals) lm.push_back(finite_or_null(v));
    doc["k_prior"] = {{"kind", cfg.k_prior}, {"max", cfg.max_k}};
    if (cfg.k_prior == "poisson") doc["k_prior"]["mean"] = cfg.k_prior_mean;
    doc["log_marginals"] = lm;
    doc["posterior_k"] = res.posterior;
    doc["map_k"] = res.map_k;
    doc["report_k"] = res.report_k;

    const auto idx = map_positions(b, *table, res.report_k);
    for (auto r : idx) res.grid_times.push_back(grid->time(r));
    doc["changepoints"] = {{"k", res.report_k}, {"grid_indices", idx}, {"grid_times", res.grid_times}};

    if (cfg.sampling_count > 0 && res.report_k > 0) {
      Stage st2{doc, "sampling"};
      const auto draws = sample_positions(b, *table, res.report_k, cfg.seed, cfg.sampling_count);
      std::map<std::size_t, std::size_t> freq;
      for (const auto& d : draws) {
        for (auto r : d) ++freq[grid->time(r)];
      }
      json f = json::array();
      for (auto [t, c] : freq) f.push_back({t, c});
      doc["samples"] = {{"k", res.report_k},
                        {"count", cfg.sampling_count},
                        {"seed", cfg.seed},
                        {"time_frequencies", f}};
    }
  }

  {
    Stage st{doc, "refine"};
    if (cfg.refine && !res.grid_times.empty()) {
      const auto r = refine_positions(res.grid_times, cfg.g, *model, {cfg.refine_max_sweeps});
      res.refined_times = r.positions;
      doc["changepoints"]["refine_sweeps"] = r.sweeps;
      doc["changepoints"]["refine_objective"] = r.objective;
    } else {
      res.refined_times = res.grid_times;
    }
    doc["changepoints"]["refined_times"] = res.refined_times;
  }
  {
    Stage st{doc, "segments"};
    std::vector<double> lp;
    doc["segments"] = segments_json(*model, res.refined_times, &lp);
    if (!lp.empty()) doc["linear_predictor"] = lp;
  }
  attach_model_diagnostics(doc, *model);
  return res;
}

json new_document(const RunConfig& cfg) {
  json doc = json::object();
  doc["tool"] = {{"name", "rfcp"}, {"version", kToolVersion}};
  doc["status"] = "running";
  doc["config"] = to_json(cfg);
  doc["rng"] = simulate::kRngAlgorithm;
  doc["timings"] = json::object();
  return doc;
}

std::string error_kind(const std::exception& e) {
  switch (exit_code_for(e)) {
    case kExitConfig: return "config";
    case kExitData: return "data";
    case kExitNumerical: return "numerical";
    default: return "internal";
  }
}

AnalysisResult run_impl(const RunConfig& cfg, const Series* given) {
  validate(cfg);
  json doc = new_document(cfg);
  try {
    Series loaded;
    if (given == nullptr) {
      Stage st{doc, "ingest"};
      loaded = ingest(cfg.data_path, *cfg.data_format);
    }
    AnalysisResult res = analyse(cfg, given != nullptr ? *given : loaded, doc);
    doc["status"] = "ok";
    // Timings last so that everything before them is reproducible byte for byte.
    json timings = std::move(doc["timings"]);
    doc.erase("timings");
    doc["timings"] = std::move(timings);
    res.document = std::move(doc);
    if (!cfg.output_path.empty()) write_document(res.document, cfg.output_path);
    return res;
  } catch (const std::exception& e) {
    doc["status"] = "error";
    doc["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
    if (!cfg.output_path.empty()) write_document(doc, cfg.output_path);
    throw;
  }
}

}  // namespace

PreparedData prepare(const RunConfig& cfg, Series series) {
  PreparedData out;
  out.values = series.values;
  if (effective_scale(cfg)) {
    if (series.format == DataFormat::Fasta) throw ConfigError("preprocess.scale applies to numeric data only");
    const bool counts = *cfg.model_kind == ModelKind::PoissonGamma ||
                        (*cfg.model_kind == ModelKind::Gmrf && cfg.model.obs.kind == gmrf::ObsKind::PoissonLog);
    if (counts) throw ConfigError("preprocess.scale cannot be used with count models");
    const auto n = static_cast<double>(out.values.size());
    if (out.values.size() < 2) throw DataError("scaling needs at least two observations");
    const double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : out.values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("cannot scale a constant series");
    for (double& v : out.values) v /= sd;
    out.scale_factor = 1.0 / sd;
  }
  out.series = std::move(series);
  return out;
}

std::unique_ptr<SegmentModel> build_model(const RunConfig& cfg, const PreparedData& data) {
  const auto& m = cfg.model;
  switch (*cfg.model_kind) {
    case ModelKind::MultinomialDirichlet:
      return std::make_unique<MultinomialDirichletModel>(data.series.symbols, m.alpha);
    case ModelKind::GaussianConjugate:
      return std::make_unique<GaussianConjugateModel>(data.values, m.nig);
    case ModelKind::PoissonGamma:
      return std::make_unique<PoissonGammaModel>(data.values, m.gamma);
    case ModelKind::Gmrf: {
      const auto latent = effective_latent(cfg);
      auto grid = gmrf::HyperGrid::build(latent, m.obs, m.grid);
      return std::make_unique<gmrf::GmrfSegmentModel>(data.values, latent, m.obs, std::move(grid),
                                                      m.min_segment_len, m.newton);
    }
  }
  throw ConfigError("unknown model kind");
}

AnalysisResult run_analysis(const RunConfig& cfg) { return run_impl(cfg, nullptr); }

AnalysisResult run_analysis(const RunConfig& cfg, const Series& series) {
  return run_impl(cfg, &series);
}

nlohmann::ordered_json refine_existing(const nlohmann::ordered_json& document,
                                       std::optional<std::size_t> max_sweeps) {
  if (!document.contains("config") || !document.contains("changepoints")) {
    throw ConfigError("result document lacks config or changepoints");
  }
  RunConfig cfg = from_json(document.at("config"));
  if (max_sweeps) cfg.refine_max_sweeps = *max_sweeps;
  validate(cfg);
  json doc = document;
  doc["config"]["refine.max_sweeps"] = cfg.refine_max_sweeps;
  doc["config"]["refine.enabled"] = true;
  const auto series = ingest(cfg.data_path, *cfg.data_format);
  const auto data = prepare(cfg, series);
  auto model = build_model(cfg, data);
  const auto times = document.at("changepoints").at("grid_times").get<std::vector<std::size_t>>();
  const auto t0 = Clock::now();
  const auto r = refine_positions(times, cfg.g, *model, {cfg.refine_max_sweeps});
  doc["changepoints"]["refine_sweeps"] = r.sweeps;
  doc["changepoints"]["refine_objective"] = r.objective;
  doc["changepoints"]["refined_times"] = r.positions;
  std::vector<double> lp;
  doc["segments"] = segments_json(*model, r.positions, &lp);
  if (!lp.empty()) doc["linear_predictor"] = lp;
  json timings = doc.contains("timings") ? doc["timings"] : json::object();
  doc.erase("timings");
  timings["refine"] = seconds_since(t0);
  doc["timings"] = timings;
  return doc;
}

nlohmann::ordered_json bayes_factor_report(const RunConfig& a, const RunConfig& b,
                                           const std::vector<std::size_t>& ks) {
  validate(a);
  validate(b);
  if (std::filesystem::weakly_canonical(a.data_path) != std::filesystem::weakly_canonical(b.data_path) ||
      a.data_format != b.data_format) {
    throw ConfigError("Bayes factor needs both models on the same data");
  }
  if (a.g != b.g) throw ConfigError("Bayes factor needs the same grid spacing");
  if (effective_scale(a) != effective_scale(b)) throw ConfigError("Bayes factor needs the same data scaling");
  for (auto k : ks) {
    if (k > a.max_k || k > b.max_k) throw ConfigError("k=" + std::to_string(k) + " exceeds changepoints.max");
  }
  const auto series = ingest(a.data_path, *a.data_format);
  auto quiet = [](RunConfig c) {
    c.refine = false;
    c.sampling_count = 0;
    c.output_path.clear();
    return c;
  };
  const auto ra = run_analysis(quiet(a), series);
  const auto rb = run_analysis(quiet(b), series);
  json rows = json::array();
  for (auto k : ks) {
    const double la = ra.log_marginals[k];
    const double lb = rb.log_marginals[k];
    json row = {{"k", k}, {"log_marginal_a", finite_or_null(la)}, {"log_marginal_b", finite_or_null(lb)}};
    if (std::isfinite(la) && std::isfinite(lb)) {
      row["log_bayes_factor"] = log_bayes_factor(la, lb);
      row["bayes_factor"] = finite_or_null(bayes_factor(la, lb));
    } else {
      throw NumericalError("k=" + std::to_string(k) + " has a non-finite log marginal");
    }
    rows.push_back(std::move(row));
  }
  json out = json::object();
  out["tool"] = {{"name", "rfcp"}, {"version", kToolVersion}};
  out["model_a"] = to_json(a);
  out["model_b"] = to_json(b);
  out["bayes_factors"] = rows;
  return out;
}

void write_document(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write result to '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const std::domain_error*>(&e)) return kExitNumerical;
  return kExitFailure;
}

}  // namespace rfcp::app
