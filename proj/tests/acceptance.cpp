// Acceptance battery: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number (e.g. `acceptance 2 3`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "sparsepac/errors.hpp"
#include "sparsepac/experiments.hpp"
#include "sparsepac/io.hpp"
#include "sparsepac/network.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/sampler.hpp"
#include "sparsepac/selection.hpp"
#include "sparsepac/synthetic.hpp"
#include "sparsepac/verify.hpp"
#include "toy.hpp"

using namespace sparsepac;

namespace {

struct Outcome {
  bool passed = false;
  std::string statistic;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> body;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---- 1 ------------------------------------------------------------------------

Outcome donsker_varadhan() {
  Rng rng(101);
  double worst_gap = 0.0;
  double worst_excess = -INFINITY;
  std::size_t grid_total = 0;
  for (int space = 0; space < 50; ++space) {
    const std::size_t k = 2 + rng.index(9);
    std::vector<double> mu(k);
    std::vector<double> h(k);
    double total = 0.0;
    for (double& m : mu) total += (m = rng.uniform(0.0, 1.0));
    for (double& m : mu) m /= total;
    for (double& v : h) v = rng.uniform(-30.0, 30.0);

    // oracle: log-sum-exp and the variational value at the tilted measure
    long double top = -INFINITY;
    for (std::size_t i = 0; i < k; ++i) top = std::max<long double>(top, std::log((long double)mu[i]) + h[i]);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < k; ++i) acc += std::exp(std::log((long double)mu[i]) + h[i] - top);
    const long double lhs = top + std::log(acc);
    long double variational = 0.0L;
    for (std::size_t i = 0; i < k; ++i) {
      const long double rho = std::exp(std::log((long double)mu[i]) + h[i] - lhs);
      if (rho > 0.0L) variational += rho * h[i] - rho * std::log(rho / mu[i]);
    }

    const DvResult r = dv_check(mu, h);
    worst_gap = std::max({worst_gap, r.gap, (double)std::fabs((long double)r.lhs - lhs),
                          (double)std::fabs(lhs - variational)});
    worst_excess = std::max(worst_excess, r.grid_max - r.lhs);
    grid_total += r.grid_points;
  }
  return {worst_gap <= 1e-12 && worst_excess <= 1e-9,
          fmt("max gap %.2e, max grid excess %.2e over %.0f grid points", worst_gap, worst_excess,
              static_cast<double>(grid_total))};
}

// ---- 2, 3 -----------------------------------------------------------------------

ChainConfig toy_chain(double lambda, std::size_t kept, std::uint64_t seed) {
  ChainConfig cfg;
  cfg.lambda = lambda;
  cfg.burn_in = 5000;
  cfg.steps = cfg.burn_in + kept;
  cfg.seed = seed;
  cfg.slab = toy::slab();
  return cfg;
}

Outcome sampler_oracle() {
  const Dataset data = toy::data();
  const auto states = toy::enumerate(data);
  const double lambda = 5.0;
  const auto exact = toy::gibbs(states, lambda);
  const ChainResult r = run_chain(data, toy::arch(), toy_chain(lambda, 100000, 2));
  std::map<toy::Key, double> freq;
  for (const SparseParams& d : r.draws) freq[toy::key_of(d)] += 1.0 / static_cast<double>(r.draws.size());
  double tv = 0.0;
  for (const auto& [key, p] : exact) tv += std::abs(p - (freq.count(key) ? freq.at(key) : 0.0));
  tv *= 0.5;
  return {tv <= 0.05, fmt("TV %.4f over %.0f post-burn-in draws", tv, static_cast<double>(r.draws.size()))};
}

Outcome thermo_oracle() {
  const Dataset data = toy::data();
  const auto states = toy::enumerate(data);
  const double lambda = 5.0;
  const double exact = toy::exact_log_z(states, lambda);
  const ThermoEstimate est = thermo_log_z(data, toy::arch(), lambda, 15, toy_chain(lambda, 100000, 3));
  const double err = std::abs(est.log_z - exact);
  return {err <= 0.05 && est.betas.size() == 16,
          fmt("|log Z_hat - log Z| = %.2e (estimate %.4f, exact %.4f)", err, est.log_z, exact)};
}

// ---- 4 ---------------------------------------------------------------------------

Outcome kl_bound() {
  Rng rng(404);
  std::size_t violations = 0;
  double worst_slack = INFINITY;
  double worst_mismatch = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t d = 1 + rng.index(3);
    const Architecture base(d, 3 + rng.index(3), 1 + rng.index(5), 1, rng.uniform(2.0, 5.0));
    const Architecture a = base.with_sparsity(1 + rng.index(base.num_params()));
    const SparseParams center = sample_prior(a, rng);
    const double radius = max_nested_radius(center, std::exp(rng.uniform(std::log(1e-6), 0.0)));
    if (radius <= 0.0) {
      --c;
      continue;
    }
    const BoxPosterior q(center, radius);
    const double T = static_cast<double>(a.num_params());
    const double S = static_cast<double>(a.sparsity());
    const double cb = a.coef_bound();
    const double exact = std::lgamma(T + 1) - std::lgamma(S + 1) - std::lgamma(T - S + 1) + S * std::log(cb / radius);
    const double bound = S * std::log(T * cb) + 0.5 * S * std::log(1.0 / (radius * radius));
    worst_mismatch = std::max({worst_mismatch, std::abs(kl_box_to_prior(q) - exact) / std::max(1.0, exact),
                               std::abs(kl_box_bound(q) - bound) / std::max(1.0, bound)});
    violations += exact > bound + 1e-12 * std::max(1.0, bound);
    worst_slack = std::min(worst_slack, bound - exact);
  }
  const KlLemmaCheck lib = kl_lemma_check(100, 404);
  return {violations == 0 && lib.violations == 0 && worst_mismatch <= 1e-9,
          fmt("violations %.0f, min slack %.2e, library vs closed form %.1e", static_cast<double>(violations),
              worst_slack, worst_mismatch)};
}

// ---- 5 ---------------------------------------------------------------------------

Outcome perturbation() {
  Rng rng(505);
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + rng.index(3);
    const Architecture shape(d, 3 + rng.index(2), 1 + rng.index(4), 1, rng.uniform(2.0, 3.0));
    const Architecture a = shape.with_sparsity(1 + rng.index(shape.num_params()));
    const SparseParams theta = sample_prior(a, rng);
    SparseParams star = sample_prior(a, rng);
    if (rng.bernoulli(0.5)) {
      // a small perturbation of theta on the same support
      std::vector<std::pair<std::size_t, double>> e;
      for (std::size_t t : theta.active()) {
        const double v = theta.value(t) + rng.uniform(-0.05, 0.05);
        e.emplace_back(t, std::clamp(v, -a.coef_bound(), a.coef_bound()));
      }
      star = SparseParams::from_active(a, e);
    }
    // oracle side of the inequality, from per-layer sup gaps
    const std::size_t L = a.depth();
    std::vector<double> wgap(L, 0.0);
    std::vector<double> bgap(L, 0.0);
    for (std::size_t t = 0; t < a.num_params(); ++t) {
      const CoordAddress c = index_to_coord(a, t);
      const double g = std::abs(theta.value(t) - star.value(t));
      auto& slot = c.kind == CoordKind::matrix ? wgap[c.layer - 1] : bgap[c.layer - 1];
      slot = std::max(slot, g);
    }
    const double k = a.coef_bound() * static_cast<double>(a.width());
    const double dd = static_cast<double>(d);
    double bound = std::pow(k, static_cast<double>(L - 1)) * (k * (dd + 1) - dd) / (k - 1);
    double wsum = 0.0;
    for (double g : wgap) wsum += g;
    bound *= wsum;
    for (std::size_t u = 1; u <= L; ++u) bound += std::pow(k, static_cast<double>(L - u)) * bgap[u - 1];

    double max_diff = 0.0;
    std::vector<double> x(d);
    std::vector<double> xs;
    for (int i = 0; i < 200; ++i) {
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      xs.insert(xs.end(), x.begin(), x.end());
      max_diff = std::max(max_diff, std::abs(forward(theta, x) - forward(star, x)));
    }
    const PerturbationCheck lib = perturbation_check(theta, star, xs);
    if (max_diff > bound * (1 + 1e-12) + 1e-12 || !lib.passed ||
        std::abs(lib.lemma_bound - bound) > 1e-9 * std::max(1.0, bound)) {
      ++violations;
    }
    if (bound > 0) worst_ratio = std::max(worst_ratio, max_diff / bound);
  }
  return {violations == 0, fmt("violations %.0f of 1000, max diff/bound %.4f", static_cast<double>(violations),
                               worst_ratio)};
}

// ---- 6 ---------------------------------------------------------------------------

Outcome mgf_bounds() {
  struct Point {
    double lambda;
    std::size_t n;
    BoundedVariable u;
  };
  const std::vector<Point> grid{
      {1.0, 1, rademacher_variable()},           {std::sqrt(10.0), 10, rademacher_variable()},
      {10.0, 100, rademacher_variable()},        {40.0, 100, rademacher_variable()},
      {8.0, 16, uniform_symmetric_variable()},   {2.0, 4, uniform_symmetric_variable()},
      {20.0, 50, uniform_symmetric_variable()},  {5.0, 10, centered_bernoulli_variable(0.1)},
      {10.0, 25, centered_bernoulli_variable(0.5)}, {3.0, 10, zero_variable()}};
  std::size_t failures = 0;
  std::uint64_t seed = 600;
  for (const Point& p : grid) {
    const MgfCheck r = hoeffding_check(p.lambda, p.n, p.u, 20000, ++seed);
    const double w = p.u.upper - p.u.lower;
    const double bound = std::exp(p.lambda * p.lambda * w * w / (8.0 * static_cast<double>(p.n)));
    if (!(r.estimate - 3.0 * r.std_error <= bound) || std::abs(r.bound - bound) > 1e-9 * bound) ++failures;
  }
  std::size_t bernstein_failures = 0;
  for (double prob : {0.05, 0.2, 0.5}) {
    for (double zeta : {0.25, 0.5, 0.9}) {
      const std::size_t n = 16;
      const double v = static_cast<double>(n) * prob;
      const BernsteinCheck r = bernstein_check(zeta, v, 1.0, n, bernoulli_variable(prob), 20000, ++seed);
      const double bound = std::exp(v * zeta * zeta / (2.0 * (1.0 - zeta)));
      if (!r.moments_ok || !(r.mgf.estimate - 3.0 * r.mgf.std_error <= bound)) ++bernstein_failures;
    }
  }
  std::size_t hard = 0;
  for (std::size_t n = 1; n <= 1000; ++n) {
    const double nn = static_cast<double>(n);
    if (nn * std::log(std::cosh(1.0 / std::sqrt(nn))) > 0.5) ++hard;
  }
  return {failures == 0 && bernstein_failures == 0 && hard == 0,
          fmt("Hoeffding misses %.0f/10, Bernstein misses %.0f/9, Rademacher hard violations %.0f",
              static_cast<double>(failures), static_cast<double>(bernstein_failures), static_cast<double>(hard))};
}

// ---- 7 ---------------------------------------------------------------------------

Outcome risk_domination() {
  Rng rng(707);
  std::size_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = 1 + rng.index(4);
    const Architecture shape(d, 3 + rng.index(2), 1 + rng.index(4), 1);
    const Architecture a = shape.with_sparsity(1 + rng.index(shape.num_params()));
    const SparseParams p = sample_prior(a, rng);
    const std::size_t n = 1 + rng.index(30);
    std::vector<double> xs(n * d);
    std::vector<int> ys(n);
    for (double& v : xs) v = rng.uniform(-1.0, 1.0);
    for (int& y : ys) y = rng.bernoulli(0.5) ? 1 : -1;
    const Dataset data(d, xs, ys);
    double hinge = 0.0;
    double zero_one = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = ys[i] * forward(p, data.row(i));
      hinge += std::max(0.0, 1.0 - m) / static_cast<double>(n);
      zero_one += (m <= 0.0 ? 1.0 : 0.0) / static_cast<double>(n);
    }
    const double h = hinge_risk(p, data);
    const double z = zero_one_risk(p, data);
    if (h < z || std::abs(h - hinge) > 1e-12 || std::abs(z - zero_one) > 1e-12) ++violations;
  }
  return {violations == 0, fmt("violations %.0f of 10000", static_cast<double>(violations))};
}

// ---- 8 ---------------------------------------------------------------------------

Outcome certificate_coverage() {
  std::size_t covered = 0;
  std::size_t estimation_failures = 0;
  std::vector<double> margins;
  for (std::uint64_t s = 0; s < 100; ++s) {
    CertificateTrialConfig cfg;
    cfg.seed = 8000 + s;
    cfg.chain.steps = 5000;
    cfg.chain.burn_in = 2500;
    cfg.chain.thin = 5;
    try {
      const CertificateTrial t = run_certificate_trial(cfg);
      covered += t.covered;
      margins.push_back(t.report.total - t.true_risk);
    } catch (const EstimationError&) {
      ++estimation_failures;
    }
  }
  return {covered >= 90, fmt("covered %.0f/100 (estimation failures %.0f), median margin %.3f",
                             static_cast<double>(covered), static_cast<double>(estimation_failures),
                             margins.empty() ? NAN : median(margins))};
}

// ---- 9 ---------------------------------------------------------------------------

Outcome rate_decay() {
  RateExperimentConfig cfg;
  cfg.seed = 9;
  cfg.chain.steps = 20000;
  cfg.chain.burn_in = 10000;
  cfg.chain.thin = 10;
  const RateExperimentResult r = run_rate_experiment(cfg);
  const double first = r.points.front().median;
  const double last = r.points.back().median;
  std::string medians;
  for (const RatePoint& p : r.points) medians += fmt("%.4f ", p.median);
  return {r.slope < 0.0 && last < 0.5 * first,
          fmt("slope %.3f, median(1600)/median(100) = %.3f", r.slope, last / first) + "; medians " + medians};
}

// ---- 10 --------------------------------------------------------------------------

Outcome selection_sanity() {
  std::vector<double> regrets;
  std::size_t picked_true = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    SelectionTrialConfig cfg;
    cfg.teacher = Architecture(2, 3, 3, 6);
    cfg.candidates = {Architecture(2, 3, 2, 4), Architecture(2, 3, 3, 6), Architecture(2, 3, 4, 8),
                      Architecture(2, 4, 3, 6)};
    cfg.chain.steps = 5000;
    cfg.chain.burn_in = 2500;
    cfg.chain.thin = 5;
    cfg.seed = 10000 + s;
    const SelectionTrial t = run_selection_trial(cfg);
    regrets.push_back(t.regret);
    picked_true += t.selection.best == 1;
  }
  const double m = median(regrets);
  return {m <= 0.05, fmt("median regret %.4f, max regret %.4f, teacher shape picked %.0f/10", m,
                         *std::max_element(regrets.begin(), regrets.end()), static_cast<double>(picked_true))};
}

// ---- 11 --------------------------------------------------------------------------

Outcome determinism() {
  namespace fs = std::filesystem;
  using cli_harness::run;
  const std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> commands{
      {"gen-data",
       {{"gen-data", "--d", "2", "--n", "200", "--test-n", "400", "--noise", "flip:0.1", "--seed", "5", "--out",
         "data"}}},
      {"sample",
       {{"gen-data", "--d", "2", "--n", "100", "--seed", "1", "--out", "d"},
        {"sample", "--data", "d.csv", "--arch", "3,3,6", "--steps", "2000", "--burnin", "500", "--chains", "3",
         "--seed", "7", "--out", "chain"},
        {"sample", "--data", "d.csv", "--steps", "3000", "--resume", "chain.checkpoint.json", "--out", "more"}}},
      {"certify",
       {{"gen-data", "--d", "2", "--n", "100", "--test-n", "300", "--seed", "1", "--out", "d"},
        {"certify", "--data", "d.csv", "--arch", "3,3,6", "--steps", "3000", "--burnin", "500", "--ti-intervals",
         "5", "--test", "d.test.csv", "--seed", "3", "--out", "cert.json"}}},
      {"select",
       {{"gen-data", "--d", "2", "--n", "100", "--seed", "1", "--out", "d"},
        {"select", "--data", "d.csv", "--grid", "grid.json", "--steps", "1500", "--burnin", "500",
         "--ti-intervals", "4", "--seed", "4", "--out", "sel.json"}}},
      {"rate-exp",
       {{"rate-exp", "--sizes", "50,100,200", "--seeds", "2", "--steps", "2000", "--burnin", "1000",
         "--test-n", "500", "--seed", "6", "--out", "rate"}}},
      {"verify", {{"verify", "--seed", "3", "--out", "card.json"}}},
  };
  std::size_t differing = 0;
  std::string which;
  std::size_t files = 0;
  for (const auto& [name, steps] : commands) {
    std::vector<std::vector<std::pair<std::string, std::string>>> snaps;
    std::vector<std::vector<int>> codes(2);
    for (int rep = 0; rep < 2; ++rep) {
      cli_harness::ScratchDir dir("determinism_" + name + "_" + std::to_string(rep));
      cli_harness::write_text("grid.json", R"([{"L": 3, "D": 2, "S": 4}, {"L": 3, "D": 3, "S": 6}])");
      for (const auto& args : steps) codes[rep].push_back(run(args).code);
      snaps.push_back(cli_harness::snapshot(dir.path()));
    }
    files += snaps[0].size();
    if (snaps[0] != snaps[1] || codes[0] != codes[1] || snaps[0].size() < 2) {
      ++differing;
      which += name + " ";
    }
  }
  return {differing == 0, fmt("%.0f subcommands, %.0f files compared, %.0f differ", 6.0,
                              static_cast<double>(files), static_cast<double>(differing)) +
                              (which.empty() ? "" : " (" + which + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "Donsker-Varadhan identity", 1.0, donsker_varadhan},
      {2, "sampler vs enumerated Gibbs (toy)", 30.0, sampler_oracle},
      {3, "thermodynamic integration vs exact log Z (toy)", 120.0, thermo_oracle},
      {4, "box KL never exceeds its bound", 60.0, kl_bound},
      {5, "layer perturbation bound", 60.0, perturbation},
      {6, "Hoeffding and Bernstein MGF bounds", 60.0, mgf_bounds},
      {7, "hinge risk dominates 0-1 risk", 60.0, risk_domination},
      {8, "certificate coverage", 900.0, certificate_coverage},
      {9, "error decays with n", 1800.0, rate_decay},
      {10, "model selection regret", 1800.0, selection_sanity},
      {11, "byte-identical CLI reruns", 600.0, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool ok = o.passed && in_time;
    failed += !ok;
    std::printf("%s  [%2d] %s: %s; %.2f s (budget %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.statistic.c_str(), secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
