#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsepac/network.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/rng.hpp"

namespace sparsepac {

// Metropolis-Hastings settings for sampling the Gibbs posterior
// rho_lambda(theta) ~ exp(-lambda r_n^h(theta)) pi(theta).
struct ChainConfig {
  double lambda = 1.0;       // inverse temperature, >= 0
  std::size_t steps = 10000;  // total MH steps per chain, burn-in included
  std::size_t burn_in = 1000;
  std::size_t thin = 1;
  double step_size = 0.0;  // weight-move half-width; 0 selects C_B / 10
  double swap_prob = 0.3;
  std::uint64_t seed = 0;
  std::size_t chains = 1;
  Slab slab{};
  bool keep_draws = true;  // false keeps only the hinge trace

  // Throws ConfigError on any inconsistent field.
  void validate(const Architecture& arch) const;
  double resolved_step_size(const Architecture& arch) const;

  bool operator==(const ChainConfig&) const = default;
};

enum class MoveType : std::uint8_t { weight, swap, swap_skipped };

const char* to_string(MoveType move);

struct ChainState {
  SparseParams params;
  double hinge = 0.0;  // r_n^h(params), always a full recomputation
};

// Single-site move: one active coordinate gets uniform(-step, step) noise,
// folded back into [-C_B, C_B] by reflection. On a quantized slab the move is
// a uniform lattice step in {-m..-1, 1..m}, m = round(step / spacing),
// folded back by mirroring half a level beyond each end. Both kernels are symmetric.
SparseParams propose_weight(const SparseParams& current, Rng& rng, double step_size,
                            Slab slab = {});

// Moves the support: a uniformly chosen active index is switched off and a
// uniformly chosen inactive index is switched on with a fresh slab value.
// Returns nullopt when S == T (no inactive index exists).
std::optional<SparseParams> propose_swap(const SparseParams& current, Rng& rng, Slab slab = {});

struct StepOutcome {
  ChainState next;
  bool accepted = false;
  MoveType move = MoveType::weight;
};

// One MH transition. The prior is flat on the exact-S support and both move
// types are symmetric, so the acceptance probability is
// min(1, exp(-lambda * (r_n^h(proposal) - r_n^h(current)))).
StepOutcome mh_step(const ChainState& current, const Dataset& data, const ChainConfig& cfg,
                    Rng& rng, const Activation& act = Activation::relu());

struct MoveStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  double rate() const noexcept {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  bool operator==(const MoveStats&) const = default;
};

// Where a chain stopped; enough to continue it bit-exactly.
struct ChainTail {
  ChainState current;
  std::string rng_state;
  std::size_t steps_done = 0;
  MoveStats weight;
  MoveStats swap;
  std::size_t swaps_skipped = 0;
};

struct ChainResult {
  ChainConfig config;
  Architecture arch;
  // Kept draws of all chains, chain 0 first.
  std::vector<SparseParams> draws;
  std::vector<double> hinge_trace;
  std::vector<std::size_t> chain_lengths;
  std::vector<ChainTail> tails;
  MoveStats weight_moves;
  MoveStats swap_moves;
  std::size_t swaps_skipped = 0;
  double mean_hinge = 0.0;
  double mean_hinge_se = 0.0;  // batch-means standard error

  // Kept hinge values of chain c.
  std::span<const double> chain_trace(std::size_t c) const;
};

// Runs cfg.chains independent chains (in parallel), each seeded from
// (cfg.seed, chain index) and started from a prior draw; merges them in chain
// order.
ChainResult run_chain(const Dataset& data, const Architecture& arch, const ChainConfig& cfg,
                      const Activation& act = Activation::relu());

// Continues every chain of `previous` for `additional_steps` more steps. The
// result equals a fresh run with steps = previous steps + additional_steps.
ChainResult resume_chain(const Dataset& data, const ChainResult& previous,
                         std::size_t additional_steps, const Activation& act = Activation::relu());

// Indices of every max(1, draws / count)-th kept draw, at most `count` of them.
std::vector<std::size_t> evenly_spaced_draws(std::size_t draws, std::size_t count);

// One kept draw chosen uniformly: a sample theta-hat from the Gibbs posterior.
const SparseParams& stochastic_classifier_draw(const ChainResult& result, Rng& rng);

struct TraceSummary {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean of the concatenated traces with a batch-means standard error
// (floor(sqrt(len)) batches per chain, pooled across chains).
TraceSummary batch_means(std::span<const double> trace, std::span<const std::size_t> chain_lengths);

// Nodes 0 = beta_0 < ... < beta_m = lambda whose spacing grows geometrically,
// beta_k = lambda * expm1(a k / m) / expm1(a) with a = log(1 + lambda).
std::vector<double> geometric_beta_grid(double lambda, std::size_t intervals);

struct ThermoEstimate {
  double lambda = 0.0;
  double log_z = 0.0;
  double std_error = 0.0;
  std::vector<double> betas;
  std::vector<double> mean_hinge;
  std::vector<double> mean_hinge_se;
  // Chain run at beta = lambda, with draws when cfg.keep_draws was set.
  std::shared_ptr<const ChainResult> final_chain;
};

// log Z(lambda) = log E_prior exp(-lambda r_n^h) = -int_0^lambda E_beta[r_n^h] d beta,
// by trapezoid quadrature over geometric_beta_grid(lambda, intervals) with one
// chain run per node (cfg.lambda ignored; node k seeded from (cfg.seed, k)).
// Only the last node keeps draws, and only if cfg.keep_draws is set.
ThermoEstimate thermo_log_z(const Dataset& data, const Architecture& arch, double lambda,
                            std::size_t intervals, const ChainConfig& cfg,
                            const Activation& act = Activation::relu());

// Same quadrature over caller-supplied node expectations.
ThermoEstimate integrate_expected_risk(std::vector<double> betas, std::vector<double> mean_hinge,
                                       std::vector<double> mean_hinge_se);

}  // namespace sparsepac
