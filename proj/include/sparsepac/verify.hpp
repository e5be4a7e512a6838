#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsepac/network.hpp"
#include "sparsepac/rng.hpp"

namespace sparsepac {

// ---- Donsker-Varadhan -------------------------------------------------------

struct DvResult {
  double lhs = 0.0;        // log sum mu e^h
  double sup_value = 0.0;  // int h d rho - KL(rho, mu) at the Gibbs rho
  double gap = 0.0;        // |lhs - sup_value|
  std::vector<double> gibbs;
  std::size_t grid_points = 0;  // simplex-grid distributions tried (0 = skipped)
  double grid_max = 0.0;        // best variational value on the grid
};

// Checks log int e^h d mu = sup_rho [int h d rho - KL(rho, mu)] on a finite
// space. `grid_resolution` r enumerates every rho with masses in {0, 1/r, ..,
// 1}; 0 picks the finest r keeping the grid under ~50k points.
DvResult dv_check(std::span<const double> masses, std::span<const double> h,
                  std::size_t grid_resolution = 0);

// ---- MGF inequalities ------------------------------------------------------

// Bounded real random variable for the MGF checks.
struct BoundedVariable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  double mean = 0.0;
  std::function<double(Rng&)> sample;
  // E exp(s U), when available in closed form.
  std::function<double(double)> exact_mgf;
  // E U^2 and E (U)_+^k, when available in closed form.
  std::function<double(int)> exact_positive_moment;
};

BoundedVariable rademacher_variable();
BoundedVariable uniform_symmetric_variable();  // uniform on [-1, 1]
BoundedVariable zero_variable();
BoundedVariable bernoulli_variable(double p);           // {0, 1}, not centered
BoundedVariable centered_bernoulli_variable(double p);  // {1 - p, -p}

// U = 1{y f_theta(x) <= 0} - 1{y f_teacher(x) <= 0} with x uniform on the box
// and noiseless teacher labels. Its mean is R(theta) - R(teacher), estimated
// with `mean_samples` draws.
BoundedVariable excess_loss_variable(const SparseParams& theta, const SparseParams& teacher,
                                     std::uint64_t seed, std::size_t mean_samples = 200000);

struct MgfCheck {
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  std::optional<double> exact;  // closed-form MGF, when known
  bool passed = false;          // estimate - 3 se <= bound, and exact <= bound
};

// Hoeffding: E exp((lambda/n) sum U_i) <= exp(lambda^2 (b-a)^2 / (8n)) for
// independent zero-mean U_i in [a, b]. Throws InputError when a draw leaves
// [a, b] and ConfigError for a non-centered variable.
MgfCheck hoeffding_check(double lambda, std::size_t n, const BoundedVariable& u,
                         std::size_t replicates, std::uint64_t seed);

struct BernsteinCheck {
  MgfCheck mgf;
  bool moments_ok = false;
  // n E(U)_+^k / (v k! w^{k-2} / 2) for k = 3..6, and n E U^2 / v first.
  std::vector<double> moment_ratios;
};

// Bernstein: if sum E U_i^2 <= v and sum E (U_i)_+^k <= v k! w^{k-2} / 2
// (checked for k <= 6), then E exp(zeta sum (U_i - E U_i)) <=
// exp(v zeta^2 / (2 (1 - w zeta))) for zeta in (0, 1/w).
BernsteinCheck bernstein_check(double zeta, double v, double w, std::size_t n,
                               const BoundedVariable& u, std::size_t replicates,
                               std::uint64_t seed);

// ---- Network perturbation ----------------------------------------------------

struct PerturbationCheck {
  double max_diff = 0.0;
  double lemma_bound = 0.0;
  std::vector<double> weight_gaps;  // sup_ij |A_u - A*_u| per layer
  std::vector<double> bias_gaps;    // sup_j |b_u - b*_u| per layer
  bool passed = false;
};

// Closed-form side of the layer-perturbation inequality.
double perturbation_bound(const Architecture& arch, std::span<const double> weight_gaps,
                          std::span<const double> bias_gaps);

// max over the sampled inputs of |f_theta(x) - f_star(x)| against the bound.
// xs holds row-major inputs of dimension d.
PerturbationCheck perturbation_check(const SparseParams& theta, const SparseParams& star,
                                     std::span<const double> xs,
                                     const Activation& act = Activation::relu());

// ---- Concentration of the oracle empirical risk ------------------------------

struct Lemma1Check {
  double bound = 0.0;  // (1 + varsigma) R* + log(1/eps) / (n varsigma)
  double violation_fraction = 0.0;
  double allowed = 0.0;  // eps + 3 binomial standard errors
  bool passed = false;
};

Lemma1Check lemma1_check(double bayes_risk, std::size_t n, double epsilon, double varsigma,
                         std::size_t trials, std::uint64_t seed);

// ---- Box-posterior KL bound ---------------------------------------------------

struct KlLemmaCheck {
  std::size_t cases = 0;
  double worst_slack = 0.0;  // min(bound - exact)
  std::size_t violations = 0;
  bool passed = false;
};

// Random valid box posteriors (random small architectures, S, C_B, centers,
// radii); compares kl_box_to_prior with kl_box_bound.
KlLemmaCheck kl_lemma_check(std::size_t count, std::uint64_t seed);

// ---- Low-noise condition --------------------------------------------------------

struct MarginCheck {
  std::size_t draws = 0;
  std::size_t flagged = 0;  // draws with E(dU)^2 > C (R - R*) beyond 3 se
  double worst_ratio = 0.0;
};

// Monte-Carlo probe of E[(1{y f_theta <= 0} - 1{y f* <= 0})^2] <= C (R(theta) - R*)
// for theta drawn from the prior, on noiseless teacher data. Violations are
// flagged, not failed: C cannot be estimated from data.
MarginCheck margin_condition_check(const SparseParams& teacher, double margin_constant,
                                   std::size_t prior_draws, std::size_t points, std::uint64_t seed);

// ---- Battery --------------------------------------------------------------------

struct CheckRecord {
  std::string name;
  double statistic = 0.0;
  double bound = 0.0;
  bool passed = false;
  bool flag_only = false;
  std::string detail;
};

struct Scorecard {
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;
  bool all_passed() const;
};

// Every lemma check at its acceptance-level settings.
Scorecard run_lemma_battery(std::uint64_t seed);

}  // namespace sparsepac
