#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sparsepac/bounds.hpp"
#include "sparsepac/network.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/sampler.hpp"
#include "sparsepac/selection.hpp"
#include "sparsepac/synthetic.hpp"

namespace sparsepac {

// Posterior-averaged held-out misclassification: mean of test_misclassification
// over up to `eval_draws` evenly spaced kept draws.
double posterior_test_error(const ChainResult& chain, const Dataset& test, std::size_t eval_draws,
                            const Activation& act = Activation::relu());

struct RateExperimentConfig {
  std::vector<std::size_t> sizes{100, 200, 400, 800, 1600};
  std::size_t seeds = 10;
  Architecture arch{2, 3, 3, 6};  // teacher and model
  NoiseModel noise{};
  double margin_constant = 1.0;  // lambda = 2n / (3C + 2)
  ChainConfig chain{};           // lambda and seed are set per trial
  std::size_t test_size = 10000;
  std::size_t eval_draws = 50;
  std::uint64_t seed = 0;
};

struct RatePoint {
  std::size_t n = 0;
  double lambda = 0.0;
  std::vector<double> test_errors;  // one per seed
  double median = 0.0;
  double mean = 0.0;
  double theory = 0.0;  // complexity_term / n; NaN when undefined (D < 2 or d > D)
};

struct RateExperimentResult {
  std::vector<RatePoint> points;
  // Least-squares fit of log(median error) on log n; medians are floored at
  // 0.5 / test_size so that error-free points stay finite.
  double slope = 0.0;
  double intercept = 0.0;
};

// For every seed s a balanced teacher is drawn once; for every n a fresh
// training sample and a test sample of test_size points are generated and a
// Gibbs chain is run at the fast-rate temperature.
RateExperimentResult run_rate_experiment(const RateExperimentConfig& cfg);

struct CertificateTrialConfig {
  Architecture arch{2, 3, 3, 6};  // teacher and model
  std::size_t n = 200;
  double epsilon = 0.05;
  std::size_t test_size = 10000;
  std::size_t ti_intervals = 15;
  ChainConfig chain{};  // lambda is set to sqrt(n), seed per trial
  std::size_t n_mc = 50;
  std::uint64_t seed = 0;
};

struct CertificateTrial {
  BoundReport report;
  double true_risk = 0.0;  // posterior-averaged P(Y f <= 0) on the test sample
  bool covered = false;
};

// Noiseless teacher data; Gibbs posterior at lambda = sqrt(n) with a
// thermodynamic-integration KL; the certificate is compared with the test risk
// of the same posterior draws.
CertificateTrial run_certificate_trial(const CertificateTrialConfig& cfg);

struct SelectionTrialConfig {
  Architecture teacher{2, 3, 3, 6};
  std::vector<Architecture> candidates;
  std::size_t n = 400;
  double lambda = 0.0;  // 0 selects 2n/5
  std::size_t ti_intervals = 15;
  ChainConfig chain{};
  std::size_t test_size = 10000;
  std::size_t eval_draws = 50;
  std::uint64_t seed = 0;
};

struct SelectionTrial {
  SelectionResult selection;
  std::vector<double> test_errors;  // per candidate, NaN for rejected ones
  std::size_t grid_best = 0;
  double regret = 0.0;  // selected test error minus grid-best test error
};

SelectionTrial run_selection_trial(const SelectionTrialConfig& cfg);

}  // namespace sparsepac
