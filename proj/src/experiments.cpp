#include "sparsepac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>

#include "sparsepac/errors.hpp"
#include "sparsepac/parallel.hpp"
#include "sparsepac/rng.hpp"

namespace sparsepac {
namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double posterior_test_error(const ChainResult& chain, const Dataset& test, std::size_t eval_draws,
                            const Activation& act) {
  if (chain.draws.empty()) throw ConfigError("posterior test error needs kept draws");
  const std::vector<std::size_t> idx = evenly_spaced_draws(chain.draws.size(), eval_draws);
  if (idx.empty()) throw ConfigError("eval_draws must be positive");
  double sum = 0.0;
  for (std::size_t i : idx) sum += test_misclassification(chain.draws[i], test, act).rate;
  return sum / static_cast<double>(idx.size());
}

RateExperimentResult run_rate_experiment(const RateExperimentConfig& cfg) {
  if (cfg.sizes.size() < 3) throw ConfigError("rate experiment needs at least three sample sizes");
  if (cfg.seeds < 1) throw ConfigError("rate experiment needs at least one seed");
  for (std::size_t n : cfg.sizes) {
    if (n < 1) throw ConfigError("sample sizes must be positive");
  }
  const std::size_t ns = cfg.sizes.size();
  std::vector<std::optional<SparseParams>> teachers(cfg.seeds);
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    teachers[s].emplace(draw_balanced_teacher(cfg.arch, derive_seed(cfg.seed, s)));
  }
  std::vector<double> errors(ns * cfg.seeds);
  parallel_for(errors.size(), [&](std::size_t job) {
    const std::size_t k = job / cfg.seeds;
    const std::size_t s = job % cfg.seeds;
    const std::size_t n = cfg.sizes[k];
    const TeacherSpec spec{*teachers[s], cfg.noise, 0.0};
    const std::uint64_t trial_seed = derive_seed(derive_seed(cfg.seed, s), 1000 + n);
    const Dataset train = gen_dataset(spec, n, derive_seed(trial_seed, 0));
    const Dataset test = gen_dataset(spec, cfg.test_size, derive_seed(trial_seed, 1));
    ChainConfig chain = cfg.chain;
    chain.lambda = fast_rate_lambda(n, cfg.margin_constant);
    chain.seed = derive_seed(trial_seed, 2);
    chain.keep_draws = true;
    errors[job] = posterior_test_error(run_chain(train, cfg.arch, chain), test, cfg.eval_draws);
  });

  RateExperimentResult result;
  std::vector<double> xs;
  std::vector<double> ys;
  const double floor = 0.5 / static_cast<double>(cfg.test_size);
  for (std::size_t k = 0; k < ns; ++k) {
    RatePoint p;
    p.n = cfg.sizes[k];
    p.lambda = fast_rate_lambda(p.n, cfg.margin_constant);
    p.test_errors.assign(errors.begin() + static_cast<std::ptrdiff_t>(k * cfg.seeds),
                         errors.begin() + static_cast<std::ptrdiff_t>((k + 1) * cfg.seeds));
    p.median = median_of(p.test_errors);
    p.mean = std::accumulate(p.test_errors.begin(), p.test_errors.end(), 0.0) /
             static_cast<double>(cfg.seeds);
    try {
      p.theory = complexity_term(cfg.arch, p.n) / static_cast<double>(p.n);
    } catch (const DomainError&) {
      p.theory = std::numeric_limits<double>::quiet_NaN();
    }
    xs.push_back(std::log(static_cast<double>(p.n)));
    ys.push_back(std::log(std::max(p.median, floor)));
    result.points.push_back(std::move(p));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(ns);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ns);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < ns; ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  if (!(sxx > 0.0)) throw ConfigError("sample sizes must not all be equal");
  result.slope = sxy / sxx;
  result.intercept = my - result.slope * mx;
  return result;
}

CertificateTrial run_certificate_trial(const CertificateTrialConfig& cfg) {
  const SparseParams teacher = draw_balanced_teacher(cfg.arch, derive_seed(cfg.seed, 0));
  const TeacherSpec spec{teacher, NoiseModel::noiseless(), 0.0};
  const Dataset train = gen_dataset(spec, cfg.n, derive_seed(cfg.seed, 1));
  const Dataset test = gen_dataset(spec, cfg.test_size, derive_seed(cfg.seed, 2));
  const double lambda = slow_rate_lambda(cfg.n);
  ChainConfig chain = cfg.chain;
  chain.lambda = lambda;
  chain.seed = derive_seed(cfg.seed, 3);
  chain.keep_draws = true;
  const ThermoEstimate thermo = thermo_log_z(train, cfg.arch, lambda, cfg.ti_intervals, chain);
  const ChainResult& posterior = *thermo.final_chain;

  CertificateTrial trial;
  trial.report = empirical_certificate(train, GibbsCertificateInput{&posterior, thermo}, lambda,
                                       cfg.epsilon, cfg.n_mc, derive_seed(cfg.seed, 4));
  const std::vector<std::size_t> idx = evenly_spaced_draws(posterior.draws.size(), cfg.n_mc);
  double sum = 0.0;
  for (std::size_t i : idx) sum += zero_one_risk(posterior.draws[i], test);
  trial.true_risk = sum / static_cast<double>(idx.size());
  trial.covered = trial.report.total >= trial.true_risk;
  return trial;
}

SelectionTrial run_selection_trial(const SelectionTrialConfig& cfg) {
  if (cfg.candidates.empty()) throw ConfigError("selection trial needs candidates");
  const SparseParams teacher = draw_balanced_teacher(cfg.teacher, derive_seed(cfg.seed, 0));
  const TeacherSpec spec{teacher, NoiseModel::noiseless(), 0.0};
  const Dataset train = gen_dataset(spec, cfg.n, derive_seed(cfg.seed, 1));
  const Dataset test = gen_dataset(spec, cfg.test_size, derive_seed(cfg.seed, 2));

  CandidateGrid grid;
  grid.candidates = cfg.candidates;
  grid.lambda = cfg.lambda > 0.0 ? cfg.lambda : fast_rate_lambda(cfg.n);
  grid.ti_intervals = cfg.ti_intervals;
  grid.chain = cfg.chain;
  grid.chain.seed = derive_seed(cfg.seed, 3);
  grid.chain.keep_draws = true;

  SelectionTrial trial{select_architecture(grid, train), {}, 0, 0.0};
  bool found = false;
  for (std::size_t i = 0; i < trial.selection.scores.size(); ++i) {
    const CandidateScore& s = trial.selection.scores[i];
    if (s.rejected || !s.posterior) {
      trial.test_errors.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    trial.test_errors.push_back(posterior_test_error(*s.posterior, test, cfg.eval_draws));
    if (!found || trial.test_errors[i] < trial.test_errors[trial.grid_best]) {
      trial.grid_best = i;
      found = true;
    }
  }
  trial.regret = trial.test_errors[trial.selection.best] - trial.test_errors[trial.grid_best];
  return trial;
}

}  // namespace sparsepac
