#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsepac/network.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/sampler.hpp"

namespace sparsepac {

// log p_{S,L,D} = -L log 2 - log(max(floor(e^L), d) - d + 1) - log T: depth
// geometric, width uniform on {d, ..., max(floor(e^L), d)}, sparsity uniform
// on {1, ..., T}. Returns -infinity when D lies outside its support.
double log_prior_belief(const Architecture& arch);

// Upper end of the width support for depth L and input dimension d.
std::size_t max_width_for_depth(std::size_t depth, std::size_t input_dim);

struct ObjectiveEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double log_belief = 0.0;
  ThermoEstimate thermo;
};

// Free-energy criterion int r_n^h d rho + (KL(rho, pi) + log(1/p)) / lambda at
// the Gibbs posterior, via -(1/lambda) log Z(lambda) + log(1/p) / lambda.
// Returns +infinity (no chains run) for candidates outside the belief support.
ObjectiveEstimate selection_objective(const Architecture& arch, const Dataset& data, double lambda,
                                      std::size_t ti_intervals, const ChainConfig& cfg,
                                      const Activation& act = Activation::relu());

struct CandidateGrid {
  std::vector<Architecture> candidates;
  double lambda = 1.0;
  std::size_t ti_intervals = 16;
  ChainConfig chain;  // seed, steps and move settings shared by all candidates
};

struct CandidateScore {
  Architecture arch;
  double objective = 0.0;
  double std_error = 0.0;
  double log_belief = 0.0;
  double log_z = 0.0;
  double log_z_se = 0.0;
  bool rejected = false;
  std::string reason{};
  // Gibbs chain at lambda (draws kept when grid.chain.keep_draws is set).
  std::shared_ptr<const ChainResult> posterior{};
};

struct SelectionResult {
  std::vector<CandidateScore> scores;  // grid order
  std::size_t best = 0;

  const Architecture& selected() const { return scores.at(best).arch; }
};

// Seed used for a candidate: depends on the grid seed and the candidate's own
// (d, L, D, S, C_B), never on its grid position.
std::uint64_t candidate_seed(std::uint64_t seed, const Architecture& arch);

// Evaluates every candidate (in parallel) and returns the argmin objective;
// ties go to the earliest candidate. Throws SelectionError when every
// candidate is rejected.
SelectionResult select_architecture(const CandidateGrid& grid, const Dataset& data,
                                    const Activation& act = Activation::relu());

// Low-dimensional recipe: L = 8 + (floor(log2 n) + 5)(1 + ceil(log2 d)),
// D = C_D floor(n^{d/(2 beta + d)} / ln n) (at least 1),
// S = min(T, ceil(94 d^2 (beta+1)^{2d} D (L + ceil(log2 d)))).
Architecture preset_lowdim(double n, std::size_t d, double beta, double c_width = 1.0,
                           double coef_bound = 2.0);

struct HighDimConstants {
  double depth = 1.0;
  double width = 1.0;
  double sparsity = 1.0;
};

// High-dimensional recipe: L = max(3, ceil(c_L ln n)), D = max(d, ceil(c_D d)),
// S = min(T, ceil(c_S n^{d/(2 beta + d)} ln n)).
Architecture preset_highdim(double n, std::size_t d, double beta, HighDimConstants constants = {},
                            double coef_bound = 2.0);

}  // namespace sparsepac
