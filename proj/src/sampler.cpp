#include "sparsepac/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsepac/errors.hpp"
#include "sparsepac/parallel.hpp"

namespace sparsepac {
namespace {

double reflect_into(double v, double bound) {
  while (v > bound || v < -bound) {
    if (v > bound) v = 2.0 * bound - v;
    if (v < -bound) v = -2.0 * bound - v;
  }
  return v;
}

// Folds a level index into [0, top] by mirroring about -1/2 and top + 1/2.
std::ptrdiff_t reflect_level(std::ptrdiff_t j, std::ptrdiff_t top) {
  while (j < 0 || j > top) {
    if (j < 0) j = -1 - j;
    if (j > top) j = 2 * top + 1 - j;
  }
  return j;
}

double fresh_slab_value(const Architecture& arch, Rng& rng, Slab slab) {
  const double cb = arch.coef_bound();
  return slab.is_quantized() ? slab.level_value(rng.index(slab.levels), cb) : rng.uniform(-cb, cb);
}

double hinge_of(const SparseParams& params, const Dataset& data, const Activation& act) {
  const CompiledNetwork net(params, act);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double slack = 1.0 - data.label(i) * net(data.row(i));
    if (slack > 0.0) sum += slack;
  }
  return sum / static_cast<double>(data.size());
}

struct ChainRun {
  ChainTail tail;
  std::vector<SparseParams> draws;
  std::vector<double> trace;
};

// Advances one chain from tail.steps_done up to cfg.steps.
void advance(ChainRun& run, const Dataset& data, const ChainConfig& cfg, Rng& rng,
             const Activation& act) {
  ChainTail& tail = run.tail;
  for (std::size_t s = tail.steps_done; s < cfg.steps; ++s) {
    StepOutcome out = mh_step(tail.current, data, cfg, rng, act);
    switch (out.move) {
      case MoveType::weight:
        ++tail.weight.proposed;
        tail.weight.accepted += out.accepted ? 1 : 0;
        break;
      case MoveType::swap:
        ++tail.swap.proposed;
        tail.swap.accepted += out.accepted ? 1 : 0;
        break;
      case MoveType::swap_skipped:
        ++tail.swaps_skipped;
        break;
    }
    tail.current = std::move(out.next);
    if (s >= cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0) {
      run.trace.push_back(tail.current.hinge);
      if (cfg.keep_draws) run.draws.push_back(tail.current.params);
    }
  }
  tail.steps_done = std::max(tail.steps_done, cfg.steps);
  tail.rng_state = rng.state();
}

ChainResult merge(const Architecture& arch, const ChainConfig& cfg,
                  std::vector<std::optional<ChainRun>> slots) {
  ChainResult result{cfg, arch, {}, {}, {}, {}, {}, {}, 0, 0.0, 0.0};
  for (std::optional<ChainRun>& slot : slots) {
    ChainRun& run = slot.value();
    result.chain_lengths.push_back(run.trace.size());
    result.hinge_trace.insert(result.hinge_trace.end(), run.trace.begin(), run.trace.end());
    for (SparseParams& p : run.draws) result.draws.push_back(std::move(p));
    result.weight_moves.proposed += run.tail.weight.proposed;
    result.weight_moves.accepted += run.tail.weight.accepted;
    result.swap_moves.proposed += run.tail.swap.proposed;
    result.swap_moves.accepted += run.tail.swap.accepted;
    result.swaps_skipped += run.tail.swaps_skipped;
    result.tails.push_back(std::move(run.tail));
  }
  const TraceSummary summary = batch_means(result.hinge_trace, result.chain_lengths);
  result.mean_hinge = summary.mean;
  result.mean_hinge_se = summary.std_error;
  return result;
}

}  // namespace

const char* to_string(MoveType move) {
  switch (move) {
    case MoveType::weight:
      return "weight";
    case MoveType::swap:
      return "swap";
    case MoveType::swap_skipped:
      return "swap_skipped";
  }
  return "unknown";
}

void ChainConfig::validate(const Architecture& arch) const {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) throw ConfigError("lambda must be finite and >= 0");
  if (steps == 0) throw ConfigError("steps must be positive");
  if (burn_in >= steps) throw ConfigError("burn_in must be smaller than steps");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (chains < 1) throw ConfigError("chains must be >= 1");
  if (!(swap_prob >= 0.0 && swap_prob < 1.0)) throw ConfigError("swap_prob must lie in [0, 1)");
  const double step = resolved_step_size(arch);
  if (!(step > 0.0 && step <= 2.0 * arch.coef_bound())) {
    throw ConfigError("step_size must lie in (0, 2 C_B]");
  }
  if (slab.levels == 1) throw ConfigError("a quantized slab needs at least 2 levels");
}

double ChainConfig::resolved_step_size(const Architecture& arch) const {
  return step_size == 0.0 ? arch.coef_bound() / 10.0 : step_size;
}

std::span<const double> ChainResult::chain_trace(std::size_t c) const {
  if (c >= chain_lengths.size()) throw IndexError("chain index out of range");
  const std::size_t start =
      std::accumulate(chain_lengths.begin(), chain_lengths.begin() + static_cast<std::ptrdiff_t>(c),
                      std::size_t{0});
  return {hinge_trace.data() + start, chain_lengths[c]};
}

SparseParams propose_weight(const SparseParams& current, Rng& rng, double step_size, Slab slab) {
  const auto active = current.active();
  const std::size_t t = active[rng.index(active.size())];
  const double cb = current.arch().coef_bound();
  if (slab.is_quantized()) {
    const auto top = static_cast<std::ptrdiff_t>(slab.levels - 1);
    const double spacing = 2.0 * cb / static_cast<double>(top);
    const auto reach = static_cast<std::ptrdiff_t>(
        std::clamp(std::round(step_size / spacing), 1.0, static_cast<double>(top)));
    // Uniform over {-reach..-1, 1..reach}.
    auto step = static_cast<std::ptrdiff_t>(rng.index(static_cast<std::size_t>(2 * reach))) - reach;
    if (step >= 0) ++step;
    const auto j = static_cast<std::ptrdiff_t>(slab.level_index(current.value(t), cb));
    return current.with_value(t, slab.level_value(static_cast<std::size_t>(reflect_level(j + step, top)), cb));
  }
  const double v = current.value(t) + rng.uniform(-step_size, step_size);
  return current.with_value(t, reflect_into(v, cb));
}

std::optional<SparseParams> propose_swap(const SparseParams& current, Rng& rng, Slab slab) {
  const Architecture& arch = current.arch();
  const std::size_t S = arch.sparsity();
  const std::size_t T = arch.num_params();
  if (S >= T) return std::nullopt;
  const std::size_t from = current.active()[rng.index(S)];
  // k-th inactive index, found by walking the mask.
  std::size_t k = rng.index(T - S);
  std::size_t to = 0;
  for (std::size_t t = 0; t < T; ++t) {
    if (current.is_active(t)) continue;
    if (k == 0) {
      to = t;
      break;
    }
    --k;
  }
  return current.with_swap(from, to, fresh_slab_value(arch, rng, slab));
}

StepOutcome mh_step(const ChainState& current, const Dataset& data, const ChainConfig& cfg,
                    Rng& rng, const Activation& act) {
  const Architecture& arch = current.params.arch();
  std::optional<SparseParams> proposal;
  MoveType move = MoveType::weight;
  if (rng.uniform01() < cfg.swap_prob) {
    move = MoveType::swap;
    proposal = propose_swap(current.params, rng, cfg.slab);
    if (!proposal) return {current, false, MoveType::swap_skipped};
  } else {
    proposal = propose_weight(current.params, rng, cfg.resolved_step_size(arch), cfg.slab);
  }
  const double proposed_hinge = hinge_of(*proposal, data, act);
  const double log_alpha = -cfg.lambda * (proposed_hinge - current.hinge);
  const bool accept = log_alpha >= 0.0 || rng.uniform01() < std::exp(log_alpha);
  if (!accept) return {current, false, move};
  return {ChainState{std::move(*proposal), proposed_hinge}, true, move};
}

ChainResult run_chain(const Dataset& data, const Architecture& arch, const ChainConfig& cfg,
                      const Activation& act) {
  cfg.validate(arch);
  if (arch.input_dim() != data.dim()) throw ConfigError("architecture and data disagree on d");
  std::vector<std::optional<ChainRun>> runs(cfg.chains);
  parallel_for(cfg.chains, [&](std::size_t c) {
    Rng rng(cfg.seed, c);
    SparseParams start = sample_prior(arch, rng, cfg.slab);
    const double h = hinge_of(start, data, act);
    runs[c].emplace(ChainRun{ChainTail{ChainState{std::move(start), h}, {}, 0, {}, {}, 0}, {}, {}});
    advance(*runs[c], data, cfg, rng, act);
  });
  return merge(arch, cfg, std::move(runs));
}

ChainResult resume_chain(const Dataset& data, const ChainResult& previous,
                         std::size_t additional_steps, const Activation& act) {
  ChainConfig cfg = previous.config;
  cfg.steps += additional_steps;
  cfg.validate(previous.arch);
  if (previous.tails.size() != cfg.chains) throw FormatError("checkpoint tail count mismatch");
  if (previous.arch.input_dim() != data.dim()) throw ConfigError("architecture and data disagree on d");
  std::vector<std::optional<ChainRun>> runs(cfg.chains);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    const std::size_t len = previous.chain_lengths.at(c);
    runs[c].emplace(ChainRun{previous.tails[c], {}, {}});
    runs[c]->trace.assign(previous.hinge_trace.begin() + static_cast<std::ptrdiff_t>(offset),
                         previous.hinge_trace.begin() + static_cast<std::ptrdiff_t>(offset + len));
    if (cfg.keep_draws) {
      if (previous.draws.size() != previous.hinge_trace.size()) {
        throw FormatError("checkpoint draws do not match trace");
      }
      runs[c]->draws.assign(previous.draws.begin() + static_cast<std::ptrdiff_t>(offset),
                           previous.draws.begin() + static_cast<std::ptrdiff_t>(offset + len));
    }
    offset += len;
  }
  parallel_for(cfg.chains, [&](std::size_t c) {
    Rng rng(0);
    rng.restore(runs[c]->tail.rng_state);
    advance(*runs[c], data, cfg, rng, act);
  });
  return merge(previous.arch, cfg, std::move(runs));
}

std::vector<std::size_t> evenly_spaced_draws(std::size_t draws, std::size_t count) {
  std::vector<std::size_t> idx;
  if (count == 0) return idx;
  const std::size_t stride = std::max<std::size_t>(1, draws / count);
  for (std::size_t i = 0; i < draws && idx.size() < count; i += stride) idx.push_back(i);
  return idx;
}

const SparseParams& stochastic_classifier_draw(const ChainResult& result, Rng& rng) {
  if (result.draws.empty()) throw ConfigError("chain result holds no draws");
  return result.draws[rng.index(result.draws.size())];
}

TraceSummary batch_means(std::span<const double> trace, std::span<const std::size_t> chain_lengths) {
  if (trace.empty()) return {};
  const double n = static_cast<double>(trace.size());
  const double mean = std::accumulate(trace.begin(), trace.end(), 0.0) / n;
  std::vector<double> batch;
  std::size_t offset = 0;
  for (std::size_t len : chain_lengths) {
    const auto count = static_cast<std::size_t>(std::sqrt(static_cast<double>(len)));
    if (count >= 1) {
      const std::size_t size = len / count;
      const std::size_t skip = len - size * count;
      for (std::size_t b = 0; b < count; ++b) {
        const auto first = trace.begin() + static_cast<std::ptrdiff_t>(offset + skip + b * size);
        batch.push_back(std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
                        static_cast<double>(size));
      }
    }
    offset += len;
  }
  double var = 0.0;
  if (batch.size() >= 2) {
    const double bm = std::accumulate(batch.begin(), batch.end(), 0.0) / static_cast<double>(batch.size());
    for (double b : batch) var += (b - bm) * (b - bm);
    var /= static_cast<double>(batch.size() - 1);
    return {mean, std::sqrt(var / static_cast<double>(batch.size()))};
  }
  if (trace.size() < 2) return {mean, 0.0};
  for (double v : trace) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  return {mean, std::sqrt(var / n)};
}

std::vector<double> geometric_beta_grid(double lambda, std::size_t intervals) {
  if (intervals < 2) throw ConfigError("thermodynamic grid needs at least 2 intervals");
  if (!(std::isfinite(lambda) && lambda >= 0.0)) throw ConfigError("lambda must be finite and >= 0");
  std::vector<double> betas(intervals + 1, 0.0);
  if (lambda == 0.0) return betas;
  const double a = std::log1p(lambda);
  for (std::size_t k = 1; k < intervals; ++k) {
    betas[k] = lambda * std::expm1(a * static_cast<double>(k) / static_cast<double>(intervals)) /
               std::expm1(a);
  }
  betas[intervals] = lambda;
  return betas;
}

ThermoEstimate integrate_expected_risk(std::vector<double> betas, std::vector<double> mean_hinge,
                                       std::vector<double> mean_hinge_se) {
  if (betas.size() < 2 || mean_hinge.size() != betas.size() || mean_hinge_se.size() != betas.size()) {
    throw ConfigError("quadrature inputs must be aligned and hold >= 2 nodes");
  }
  double integral = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    if (!std::isfinite(mean_hinge[k]) || !std::isfinite(mean_hinge_se[k])) {
      throw NumericalError("non-finite expected risk at beta=" + std::to_string(betas[k]));
    }
    const double left = k > 0 ? betas[k] - betas[k - 1] : 0.0;
    const double right = k + 1 < betas.size() ? betas[k + 1] - betas[k] : 0.0;
    const double w = 0.5 * (left + right);
    integral += w * mean_hinge[k];
    var += w * w * mean_hinge_se[k] * mean_hinge_se[k];
  }
  ThermoEstimate est;
  est.lambda = betas.back();
  est.log_z = -integral;
  est.std_error = std::sqrt(var);
  est.betas = std::move(betas);
  est.mean_hinge = std::move(mean_hinge);
  est.mean_hinge_se = std::move(mean_hinge_se);
  return est;
}

ThermoEstimate thermo_log_z(const Dataset& data, const Architecture& arch, double lambda,
                            std::size_t intervals, const ChainConfig& cfg, const Activation& act) {
  std::vector<double> betas = geometric_beta_grid(lambda, intervals);
  std::vector<double> means(betas.size(), 0.0);
  std::vector<double> ses(betas.size(), 0.0);
  if (lambda == 0.0) return integrate_expected_risk(std::move(betas), std::move(means), std::move(ses));
  std::shared_ptr<const ChainResult> last;
  parallel_for(betas.size(), [&](std::size_t k) {
    ChainConfig node = cfg;
    node.lambda = betas[k];
    node.seed = derive_seed(cfg.seed, k);
    node.keep_draws = cfg.keep_draws && k + 1 == betas.size();
    auto r = std::make_shared<const ChainResult>(run_chain(data, arch, node, act));
    means[k] = r->mean_hinge;
    ses[k] = r->mean_hinge_se;
    if (k + 1 == betas.size()) last = std::move(r);
  });
  ThermoEstimate est = integrate_expected_risk(std::move(betas), std::move(means), std::move(ses));
  est.final_chain = std::move(last);
  return est;
}

}  // namespace sparsepac
