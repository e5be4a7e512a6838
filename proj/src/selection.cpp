#include "sparsepac/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsepac/errors.hpp"
#include "sparsepac/log.hpp"
#include "sparsepac/parallel.hpp"

namespace sparsepac {
namespace {

// ceil/floor that ignore representation noise such as log(e^6) = 6.000000001.
double stable_ceil(double x) { return std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))); }
double stable_floor(double x) { return std::floor(x + 1e-9 * std::max(1.0, std::abs(x))); }

void check_smoothness(std::size_t d, double beta) {
  if (!(beta > 0.0 && beta < static_cast<double>(d))) {
    throw ConfigError("smoothness beta must lie in (0, d)");
  }
}

std::size_t cap_sparsity(double wanted, std::size_t T) {
  if (wanted > static_cast<double>(T)) {
    warn("preset sparsity " + std::to_string(wanted) + " exceeds T=" + std::to_string(T) +
         "; capped at T");
    return T;
  }
  return static_cast<std::size_t>(std::max(1.0, wanted));
}

}  // namespace

std::size_t max_width_for_depth(std::size_t depth, std::size_t input_dim) {
  const double e_l = stable_floor(std::exp(static_cast<double>(depth)));
  if (e_l >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 2)) {
    return std::numeric_limits<std::size_t>::max() / 2;
  }
  return std::max(static_cast<std::size_t>(e_l), input_dim);
}

double log_prior_belief(const Architecture& arch) {
  const std::size_t d = arch.input_dim();
  const std::size_t top = max_width_for_depth(arch.depth(), d);
  if (arch.width() < d || arch.width() > top) return -std::numeric_limits<double>::infinity();
  return -static_cast<double>(arch.depth()) * std::log(2.0) -
         std::log(static_cast<double>(top - d + 1)) -
         std::log(static_cast<double>(arch.num_params()));
}

ObjectiveEstimate selection_objective(const Architecture& arch, const Dataset& data, double lambda,
                                      std::size_t ti_intervals, const ChainConfig& cfg,
                                      const Activation& act) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw ConfigError("selection lambda must be positive");
  ObjectiveEstimate out;
  out.log_belief = log_prior_belief(arch);
  if (!std::isfinite(out.log_belief)) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.thermo = thermo_log_z(data, arch, lambda, ti_intervals, cfg, act);
  out.value = (-out.thermo.log_z - out.log_belief) / lambda;
  out.std_error = out.thermo.std_error / lambda;
  return out;
}

std::uint64_t candidate_seed(std::uint64_t seed, const Architecture& arch) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t v : {std::uint64_t{arch.input_dim()}, std::uint64_t{arch.depth()},
                          std::uint64_t{arch.width()}, std::uint64_t{arch.sparsity()},
                          static_cast<std::uint64_t>(std::llround(arch.coef_bound() * 1e6))}) {
    h = mix64(h ^ v);
  }
  return h;
}

SelectionResult select_architecture(const CandidateGrid& grid, const Dataset& data,
                                    const Activation& act) {
  if (grid.candidates.empty()) throw ConfigError("candidate grid is empty");
  for (const Architecture& a : grid.candidates) {
    if (a.input_dim() != data.dim()) throw ConfigError("candidate " + a.to_string() + " does not match data d");
  }
  SelectionResult result;
  result.scores.reserve(grid.candidates.size());
  for (const Architecture& a : grid.candidates) result.scores.push_back(CandidateScore{.arch = a});

  parallel_for(grid.candidates.size(), [&](std::size_t i) {
    CandidateScore& score = result.scores[i];
    ChainConfig cfg = grid.chain;
    cfg.seed = candidate_seed(grid.chain.seed, score.arch);
    const ObjectiveEstimate est =
        selection_objective(score.arch, data, grid.lambda, grid.ti_intervals, cfg, act);
    score.log_belief = est.log_belief;
    score.objective = est.value;
    score.std_error = est.std_error;
    if (!std::isfinite(est.log_belief)) {
      score.rejected = true;
      score.reason = "width outside the prior-belief support {d, ..., max(floor(e^L), d)}";
      return;
    }
    score.log_z = est.thermo.log_z;
    score.log_z_se = est.thermo.std_error;
    score.posterior = est.thermo.final_chain;
  });

  bool found = false;
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    const CandidateScore& s = result.scores[i];
    if (s.rejected) continue;
    if (!found || s.objective < result.scores[result.best].objective) {
      result.best = i;
      found = true;
    }
  }
  if (!found) throw SelectionError("every candidate was rejected");
  return result;
}

Architecture preset_lowdim(double n, std::size_t d, double beta, double c_width, double coef_bound) {
  check_smoothness(d, beta);
  if (!(n > 1.0)) throw ConfigError("preset needs n > 1");
  if (!(c_width > 0.0)) throw ConfigError("width constant must be positive");
  const double dd = static_cast<double>(d);
  const double ceil_log2_d = stable_ceil(std::log2(dd));
  const double depth = 8.0 + (stable_floor(std::log2(n)) + 5.0) * (1.0 + ceil_log2_d);
  const double base = stable_floor(std::pow(n, dd / (2.0 * beta + dd)) / std::log(n));
  const double width = std::max(1.0, std::floor(c_width * base));
  const auto L = static_cast<std::size_t>(depth);
  const auto D = static_cast<std::size_t>(width);
  const std::size_t T = count_params(d, L, D);
  const double wanted =
      std::ceil(94.0 * dd * dd * std::pow(beta + 1.0, 2.0 * dd) * width * (depth + ceil_log2_d));
  return Architecture(d, L, D, cap_sparsity(wanted, T), coef_bound);
}

Architecture preset_highdim(double n, std::size_t d, double beta, HighDimConstants c,
                            double coef_bound) {
  check_smoothness(d, beta);
  if (!(n > 1.0)) throw ConfigError("preset needs n > 1");
  if (!(c.depth > 0.0 && c.width > 0.0 && c.sparsity > 0.0)) {
    throw ConfigError("preset constants must be positive");
  }
  const double dd = static_cast<double>(d);
  const auto L = static_cast<std::size_t>(std::max(3.0, stable_ceil(c.depth * std::log(n))));
  const auto D = static_cast<std::size_t>(std::max(dd, stable_ceil(c.width * dd)));
  const std::size_t T = count_params(d, L, D);
  const double wanted = stable_ceil(c.sparsity * std::pow(n, dd / (2.0 * beta + dd)) * std::log(n));
  return Architecture(d, L, D, cap_sparsity(wanted, T), coef_bound);
}

}  // namespace sparsepac
