#include "rfcp/recursions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace rfcp {
namespace {

// log d for d >= 1, log-zero for d = 0.
std::vector<LogWeight> log_integers(std::size_t upto) {
  std::vector<LogWeight> v(upto + 1, kLogZero);
  for (std::size_t d = 1; d <= upto; ++d) v[d] = std::log(static_cast<double>(d));
  return v;
}

// Two-pass log-sum-exp over a scratch buffer.
LogWeight lse_buffer(const std::vector<LogWeight>& buf, std::size_t count) {
  LogWeight m = kLogZero;
  for (std::size_t i = 0; i < count; ++i) m = std::max(m, buf[i]);
  if (m == kLogZero) return kLogZero;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += std::exp(buf[i] - m);
  return m + std::log(sum);
}

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace

RecursionTable::RecursionTable(std::size_t max_k, std::size_t grid_size)
    : max_k_(max_k), n_(grid_size), values_(max_k * (grid_size + 2), kLogZero) {}

RecursionTable backward_recursions(const SegmentTable& table, std::size_t max_k) {
  const std::size_t n = table.grid().size();
  const std::size_t last = n + 1;
  RecursionTable b(max_k, n);
  if (max_k == 0) return b;

  const auto logint = log_integers(last);
  for (std::size_t r = 1; r <= n; ++r) b.at(0, r) = table.at(r, last) + logint[last - r - 1];

  std::vector<LogWeight> buf(last);
  for (std::size_t m = 1; m < max_k; ++m) {
    // B_{m-1}(s) can only be nonzero for s <= N + 1 - 2m.
    if (last < 2 * m + 2) break;
    const std::size_t s_max = last - 2 * m;
    for (std::size_t r = 1; r + 2 <= s_max; ++r) {
      const LogWeight* row = table.row(r);
      std::size_t count = 0;
      for (std::size_t s = r + 2; s <= s_max; ++s) {
        buf[count++] = row[s - r - 1] + b.at(m - 1, s) + logint[s - r - 1];
      }
      b.at(m, r) = lse_buffer(buf, count);
    }
  }
  return b;
}

LogWeight log_marginal_given_k(const RecursionTable& b, const SegmentTable& table, std::size_t k) {
  const std::size_t n = table.grid().size();
  const std::size_t last = n + 1;
  if (k == 0) return table.at(0, last);
  if (k > b.max_k()) {
    throw std::invalid_argument("k=" + std::to_string(k) + " exceeds the recursion depth " +
                                std::to_string(b.max_k()));
  }
  const LogWeight log_z = log_z_k(last, k);
  if (log_z == kLogZero) return kLogZero;
  LogSumAccumulator acc;
  for (std::size_t s = 2; s <= n; ++s) {
    acc.add(table.at(0, s) + b.at(k - 1, s) + std::log(static_cast<double>(s - 1)));
  }
  const LogWeight v = acc.value();
  return v == kLogZero ? kLogZero : v - log_z;
}

std::vector<double> posterior_over_k(std::span<const LogWeight> log_marginals, const KPrior& prior) {
  if (log_marginals.size() > prior.max_k() + 1) {
    throw std::invalid_argument("more log marginals than the prior on k supports");
  }
  std::vector<LogWeight> joint(log_marginals.size());
  for (std::size_t k = 0; k < joint.size(); ++k) {
    assert(!std::isnan(log_marginals[k]));
    joint[k] = log_marginals[k] + prior.log_weight(k);
  }
  const LogWeight total = log_sum_exp(joint);
  if (total == kLogZero || !std::isfinite(total)) {
    throw std::domain_error("every number of changepoints has zero posterior mass");
  }
  std::vector<double> post(joint.size());
  for (std::size_t k = 0; k < joint.size(); ++k) post[k] = std::exp(joint[k] - total);
  return post;
}

std::vector<double> conditional_distribution(const RecursionTable& b, const SegmentTable& table,
                                             std::size_t k, std::size_t j, std::size_t prev) {
  const std::size_t n = table.grid().size();
  if (j < 1 || j > k || k > b.max_k()) {
    throw std::invalid_argument("changepoint index j=" + std::to_string(j) +
                                " invalid for k=" + std::to_string(k));
  }
  if (prev >= n) throw std::invalid_argument("previous changepoint leaves no room");
  const std::size_t m = k - j;
  std::vector<LogWeight> score(n + 1, kLogZero);
  for (std::size_t c = prev + 2; c <= n; ++c) {
    score[c] = table.at(prev, c) + b.at(m, c) + std::log(static_cast<double>(c - prev - 1));
  }
  const LogWeight total = log_sum_exp(score);
  if (total == kLogZero) {
    throw std::domain_error("changepoint " + std::to_string(j) +
                            " has no admissible position after grid index " +
                            std::to_string(prev));
  }
  std::vector<double> p(n + 1, 0.0);
  for (std::size_t c = 0; c <= n; ++c) p[c] = std::exp(score[c] - total);
  return p;
}

std::vector<std::size_t> map_positions(const RecursionTable& b, const SegmentTable& table,
                                       std::size_t k) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t prev = 0;
  for (std::size_t j = 1; j <= k; ++j) {
    const auto p = conditional_distribution(b, table, k, j, prev);
    const auto best = std::max_element(p.begin(), p.end());  // first maximum
    prev = static_cast<std::size_t>(best - p.begin());
    out.push_back(prev);
  }
  return out;
}

RefineResult refine_positions(std::span<const std::size_t> times, std::size_t g,
                              const SegmentModel& model, const RefineOptions& options) {
  const std::size_t n = model.size();
  const std::size_t min_len = model.min_segment_len();
  if (g < 1) throw std::invalid_argument("grid spacing must be at least 1");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == 0 || times[i] >= n || (i > 0 && times[i] <= times[i - 1])) {
      throw std::invalid_argument("changepoint times must be strictly increasing within (0, n)");
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, LogWeight> cache;
  auto seg = [&](std::size_t t, std::size_t s) {
    auto [it, inserted] = cache.try_emplace({t, s}, kLogZero);
    if (inserted) it->second = model.log_marginal(t, s);
    return it->second;
  };

  RefineResult res;
  res.positions.assign(times.begin(), times.end());
  auto& tau = res.positions;
  auto objective = [&] {
    LogWeight total = 0.0;
    std::size_t start = 1;
    for (std::size_t c : tau) {
      total += seg(start, c);
      start = c + 1;
    }
    return total + seg(start, n);
  };

  res.objective.push_back(objective());
  if (g == 1 || tau.empty()) return res;

  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const std::size_t lo = j == 0 ? 0 : tau[j - 1];
      const std::size_t hi = j + 1 == tau.size() ? n : tau[j + 1];
      const std::size_t cur = tau[j];
      const std::size_t from = std::max(cur > g - 1 ? cur - (g - 1) : 1, lo + min_len);
      const std::size_t to = std::min(cur + (g - 1), hi >= min_len ? hi - min_len : 0);

      LogWeight best = seg(lo + 1, cur) + seg(cur + 1, hi);
      std::size_t best_tau = cur;
      for (std::size_t cand = from; cand <= to; ++cand) {
        if (cand <= lo || cand >= hi || cand == cur) continue;
        const LogWeight v = seg(lo + 1, cand) + seg(cand + 1, hi);
        if (v > best) {
          best = v;
          best_tau = cand;
        }
      }
      if (best_tau != cur) {
        tau[j] = best_tau;
        changed = true;
      }
    }
    ++res.sweeps;
    res.objective.push_back(objective());
    if (!changed) break;
  }
  return res;
}

std::vector<std::vector<std::size_t>> sample_positions(const RecursionTable& b,
                                                       const SegmentTable& table, std::size_t k,
                                                       std::uint64_t seed, std::size_t count) {
  std::mt19937_64 eng(seed);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(count);
  // Cache conditionals keyed by (j, prev); degenerate posteriors revisit few keys.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> cdf_cache;
  auto cdf_for = [&](std::size_t j, std::size_t prev) -> const std::vector<double>& {
    auto it = cdf_cache.find({j, prev});
    if (it != cdf_cache.end()) return it->second;
    auto p = conditional_distribution(b, table, k, j, prev);
    for (std::size_t c = 1; c < p.size(); ++c) p[c] += p[c - 1];
    return cdf_cache.emplace(std::make_pair(j, prev), std::move(p)).first->second;
  };

  for (std::size_t draw = 0; draw < count; ++draw) {
    std::vector<std::size_t> cps;
    cps.reserve(k);
    std::size_t prev = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      const auto& cdf = cdf_for(j, prev);
      const double u = uniform01(eng) * cdf.back();
      // First index whose cumulative mass exceeds u; it always carries mass.
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      prev = static_cast<std::size_t>(it - cdf.begin());
      cps.push_back(prev);
    }
    out.push_back(std::move(cps));
  }
  return out;
}

LogWeight log_bayes_factor(LogWeight a, LogWeight b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("Bayes factor needs two finite log marginals");
  }
  return a - b;
}

double bayes_factor(LogWeight a, LogWeight b) { return std::exp(log_bayes_factor(a, b)); }

}  // namespace rfcp
