#include "sparsepac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "sparsepac/errors.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/synthetic.hpp"

namespace sparsepac {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kGridBudget = 50000;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// number of compositions of r into k non-negative parts, saturating
double composition_count(std::size_t r, std::size_t k) {
  return std::exp(std::lgamma(static_cast<double>(r + k)) - std::lgamma(static_cast<double>(r + 1)) -
                  std::lgamma(static_cast<double>(k)));
}

double variational_value(std::span<const double> rho, std::span<const double> mu,
                         std::span<const double> h) {
  double value = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (rho[i] <= 0.0) continue;
    if (mu[i] <= 0.0) return kNegInf;
    value += rho[i] * (h[i] - std::log(rho[i] / mu[i]));
  }
  return value;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

double checked_draw(const BoundedVariable& u, Rng& rng) {
  const double v = u.sample(rng);
  if (!(v >= u.lower && v <= u.upper)) {
    throw InputError("draw " + fmt(v) + " of '" + u.name + "' leaves [" + fmt(u.lower) + ", " +
                     fmt(u.upper) + "]");
  }
  return v;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

bool within(double value, double bound) {
  return value <= bound + 1e-12 * std::max(1.0, std::abs(bound));
}

}  // namespace

DvResult dv_check(std::span<const double> masses, std::span<const double> h,
                  std::size_t grid_resolution) {
  const std::size_t k = masses.size();
  if (k == 0) throw ConfigError("DV check needs a non-empty space");
  if (h.size() != k) throw ConfigError("masses and h differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) throw ConfigError("masses must be >= 0");
    if (!std::isfinite(h[i])) throw ConfigError("h must be finite");
    total += masses[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("masses must sum to 1");

  DvResult r;
  double top = kNegInf;
  for (std::size_t i = 0; i < k; ++i) {
    if (masses[i] > 0.0) top = std::max(top, std::log(masses[i]) + h[i]);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (masses[i] > 0.0) acc += std::exp(std::log(masses[i]) + h[i] - top);
  }
  r.lhs = top + std::log(acc);
  r.gibbs.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (masses[i] > 0.0) r.gibbs[i] = std::exp(std::log(masses[i]) + h[i] - r.lhs);
  }
  r.sup_value = variational_value(r.gibbs, masses, h);
  r.gap = std::abs(r.lhs - r.sup_value);

  std::size_t res = grid_resolution;
  if (res == 0) {
    while (res < 200 && composition_count(res + 1, k) <= static_cast<double>(kGridBudget)) ++res;
  }
  r.grid_max = kNegInf;
  if (res == 0) return r;

  std::vector<double> rho(k, 0.0);
  const double step = 1.0 / static_cast<double>(res);
  auto visit = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
    if (idx + 1 == k) {
      rho[idx] = static_cast<double>(remaining) * step;
      r.grid_max = std::max(r.grid_max, variational_value(rho, masses, h));
      ++r.grid_points;
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      rho[idx] = static_cast<double>(c) * step;
      self(self, idx + 1, remaining - c);
    }
  };
  visit(visit, 0, res);
  return r;
}

BoundedVariable rademacher_variable() {
  BoundedVariable u;
  u.name = "rademacher";
  u.lower = -1.0;
  u.upper = 1.0;
  u.sample = [](Rng& rng) { return rng.bernoulli(0.5) ? 1.0 : -1.0; };
  u.exact_mgf = [](double s) { return std::cosh(s); };
  u.exact_positive_moment = [](int k) { return k == 2 ? 1.0 : 0.5; };
  return u;
}

BoundedVariable uniform_symmetric_variable() {
  BoundedVariable u;
  u.name = "uniform[-1,1]";
  u.lower = -1.0;
  u.upper = 1.0;
  u.sample = [](Rng& rng) { return rng.uniform(-1.0, 1.0); };
  u.exact_mgf = [](double s) { return s == 0.0 ? 1.0 : std::sinh(s) / s; };
  u.exact_positive_moment = [](int k) {
    return k == 2 ? 1.0 / 3.0 : 0.5 / static_cast<double>(k + 1);
  };
  return u;
}

BoundedVariable zero_variable() {
  BoundedVariable u;
  u.name = "zero";
  u.sample = [](Rng&) { return 0.0; };
  u.exact_mgf = [](double) { return 1.0; };
  u.exact_positive_moment = [](int) { return 0.0; };
  return u;
}

BoundedVariable bernoulli_variable(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Bernoulli p must lie in [0, 1]");
  BoundedVariable u;
  u.name = "bernoulli(" + fmt(p) + ")";
  u.lower = 0.0;
  u.upper = 1.0;
  u.mean = p;
  u.sample = [p](Rng& rng) { return rng.bernoulli(p) ? 1.0 : 0.0; };
  u.exact_mgf = [p](double s) { return 1.0 - p + p * std::exp(s); };
  u.exact_positive_moment = [p](int) { return p; };
  return u;
}

BoundedVariable centered_bernoulli_variable(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Bernoulli p must lie in [0, 1]");
  BoundedVariable u;
  u.name = "centered-bernoulli(" + fmt(p) + ")";
  u.lower = -p;
  u.upper = 1.0 - p;
  u.sample = [p](Rng& rng) { return rng.bernoulli(p) ? 1.0 - p : -p; };
  u.exact_mgf = [p](double s) { return p * std::exp(s * (1.0 - p)) + (1.0 - p) * std::exp(-s * p); };
  u.exact_positive_moment = [p](int k) {
    return k == 2 ? p * (1.0 - p) * (1.0 - p) + (1.0 - p) * p * p
                  : p * std::pow(1.0 - p, static_cast<double>(k));
  };
  return u;
}

BoundedVariable excess_loss_variable(const SparseParams& theta, const SparseParams& teacher,
                                     std::uint64_t seed, std::size_t mean_samples) {
  if (!(theta.arch().input_dim() == teacher.arch().input_dim())) {
    throw ConfigError("theta and teacher disagree on d");
  }
  if (mean_samples < 1) throw ConfigError("mean_samples must be positive");
  auto f = std::make_shared<const CompiledNetwork>(theta);
  auto g = std::make_shared<const CompiledNetwork>(teacher);
  const std::size_t d = theta.arch().input_dim();
  auto draw = [f, g, d](Rng& rng) {
    thread_local std::vector<double> x;
    x.resize(d);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const double star = (*g)(x);
    const double y = classify_output(star);
    return ((y * (*f)(x) <= 0.0) ? 1.0 : 0.0) - ((y * star <= 0.0) ? 1.0 : 0.0);
  };
  BoundedVariable u;
  u.name = "teacher-excess-loss";
  u.lower = -1.0;
  u.upper = 1.0;
  u.sample = draw;
  Rng rng(seed, 0x6d65616e);
  double sum = 0.0;
  for (std::size_t i = 0; i < mean_samples; ++i) sum += draw(rng);
  u.mean = sum / static_cast<double>(mean_samples);
  return u;
}

MgfCheck hoeffding_check(double lambda, std::size_t n, const BoundedVariable& u,
                         std::size_t replicates, std::uint64_t seed) {
  if (!(std::isfinite(lambda) && lambda >= 0.0)) throw DomainError("lambda must be >= 0");
  if (n < 1) throw ConfigError("n must be positive");
  if (replicates < 2) throw ConfigError("need at least 2 replicates");
  if (std::abs(u.mean) > 1e-12) throw ConfigError("Hoeffding check needs a zero-mean variable");
  const double scale = lambda / static_cast<double>(n);
  std::vector<double> values(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(seed, r);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += checked_draw(u, rng);
    values[r] = std::exp(scale * sum);
  }
  const MeanSe m = mean_and_se(values);
  MgfCheck c;
  c.estimate = m.mean;
  c.std_error = m.se;
  const double range = u.upper - u.lower;
  c.bound = std::exp(lambda * lambda * range * range / (8.0 * static_cast<double>(n)));
  if (u.exact_mgf) c.exact = std::pow(u.exact_mgf(scale), static_cast<double>(n));
  c.passed = c.estimate - 3.0 * c.std_error <= c.bound && (!c.exact || within(*c.exact, c.bound));
  return c;
}

BernsteinCheck bernstein_check(double zeta, double v, double w, std::size_t n,
                               const BoundedVariable& u, std::size_t replicates,
                               std::uint64_t seed) {
  if (!(w > 0.0 && std::isfinite(w))) throw DomainError("w must be positive");
  if (!(zeta > 0.0 && zeta * w < 1.0)) throw DomainError("zeta must lie in (0, 1/w)");
  if (!(v > 0.0 && std::isfinite(v))) throw DomainError("v must be positive");
  if (n < 1) throw ConfigError("n must be positive");
  if (replicates < 2) throw ConfigError("need at least 2 replicates");

  BernsteinCheck out;
  const double nn = static_cast<double>(n);
  out.moments_ok = true;
  std::vector<std::vector<double>> powers;
  if (!u.exact_positive_moment) {
    // Monte-Carlo moments with a 3 se allowance
    constexpr std::size_t kMomentDraws = 100000;
    Rng rng(seed, 0x6d6f6d);
    powers.assign(5, std::vector<double>(kMomentDraws));
    for (std::size_t i = 0; i < kMomentDraws; ++i) {
      const double x = checked_draw(u, rng);
      const double xp = std::max(x, 0.0);
      powers[0][i] = x * x;
      for (int k = 3; k <= 6; ++k) powers[static_cast<std::size_t>(k - 2)][i] = std::pow(xp, k);
    }
  }
  for (int k = 2; k <= 6; ++k) {
    const double limit = k == 2 ? v : v * factorial(k) * std::pow(w, k - 2) / 2.0;
    double moment = 0.0;
    double slack = 0.0;
    if (u.exact_positive_moment) {
      moment = u.exact_positive_moment(k);
    } else {
      const MeanSe m = mean_and_se(powers[static_cast<std::size_t>(k - 2)]);
      moment = m.mean;
      slack = 3.0 * m.se;
    }
    out.moment_ratios.push_back(nn * moment / limit);
    if (!within(nn * (moment - slack), limit)) out.moments_ok = false;
  }

  std::vector<double> values(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(seed, r);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += checked_draw(u, rng) - u.mean;
    values[r] = std::exp(zeta * sum);
  }
  const MeanSe m = mean_and_se(values);
  out.mgf.estimate = m.mean;
  out.mgf.std_error = m.se;
  out.mgf.bound = std::exp(v * zeta * zeta / (2.0 * (1.0 - w * zeta)));
  if (u.exact_mgf) out.mgf.exact = std::pow(std::exp(-zeta * u.mean) * u.exact_mgf(zeta), nn);
  out.mgf.passed = out.moments_ok && out.mgf.estimate - 3.0 * out.mgf.std_error <= out.mgf.bound &&
                   (!out.mgf.exact || within(*out.mgf.exact, out.mgf.bound));
  return out;
}

double perturbation_bound(const Architecture& arch, std::span<const double> weight_gaps,
                          std::span<const double> bias_gaps) {
  const std::size_t L = arch.depth();
  if (weight_gaps.size() != L || bias_gaps.size() != L) {
    throw ConfigError("need one weight gap and one bias gap per layer");
  }
  const double cd = arch.coef_bound() * static_cast<double>(arch.width());
  if (!(cd > 1.0)) throw ConfigError("perturbation bound requires C_B * D > 1");
  const double d = static_cast<double>(arch.input_dim());
  const double weight_sum = std::accumulate(weight_gaps.begin(), weight_gaps.end(), 0.0);
  double bias_part = 0.0;
  for (std::size_t u = 1; u <= L; ++u) {
    bias_part += std::pow(cd, static_cast<double>(L - u)) * bias_gaps[u - 1];
  }
  return std::pow(cd, static_cast<double>(L) - 1.0) * ((cd * (d + 1.0) - d) / (cd - 1.0)) *
             weight_sum +
         bias_part;
}

PerturbationCheck perturbation_check(const SparseParams& theta, const SparseParams& star,
                                     std::span<const double> xs, const Activation& act) {
  const Architecture& arch = theta.arch();
  if (!(arch == star.arch())) throw ConfigError("theta and theta* must share an architecture");
  const std::size_t d = arch.input_dim();
  if (xs.size() % d != 0) throw ConfigError("input block is not a multiple of d");

  PerturbationCheck c;
  for (std::size_t layer = 1; layer <= arch.depth(); ++layer) {
    const std::size_t begin = arch.layer_offset(layer);
    const std::size_t n_matrix = arch.layer_width(layer) * arch.layer_width(layer - 1);
    const std::size_t end = arch.layer_offset(layer + 1);
    double wg = 0.0;
    double bg = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
      const double gap = std::abs(theta.value(t) - star.value(t));
      if (t < begin + n_matrix) {
        wg = std::max(wg, gap);
      } else {
        bg = std::max(bg, gap);
      }
    }
    c.weight_gaps.push_back(wg);
    c.bias_gaps.push_back(bg);
  }
  c.lemma_bound = perturbation_bound(arch, c.weight_gaps, c.bias_gaps);

  const CompiledNetwork f(theta, act);
  const CompiledNetwork g(star, act);
  for (std::size_t i = 0; i * d < xs.size(); ++i) {
    const std::span<const double> x = xs.subspan(i * d, d);
    for (double v : x) {
      if (!(v >= -1.0 && v <= 1.0)) throw InputError("input outside [-1,1]^d");
    }
    c.max_diff = std::max(c.max_diff, std::abs(f(x) - g(x)));
  }
  c.passed = within(c.max_diff, c.lemma_bound);
  return c;
}

Lemma1Check lemma1_check(double bayes_risk, std::size_t n, double epsilon, double varsigma,
                         std::size_t trials, std::uint64_t seed) {
  if (!(bayes_risk >= 0.0 && bayes_risk <= 1.0)) throw DomainError("R* must lie in [0, 1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(varsigma > 0.0 && std::isfinite(varsigma))) throw DomainError("varsigma must be positive");
  if (n < 1 || trials < 1) throw ConfigError("n and trials must be positive");
  Lemma1Check c;
  const double nn = static_cast<double>(n);
  c.bound = (1.0 + varsigma) * bayes_risk + std::log(1.0 / epsilon) / (nn * varsigma);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed, t);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) errors += rng.bernoulli(bayes_risk) ? 1 : 0;
    if (static_cast<double>(errors) / nn > c.bound) ++violations;
  }
  const double tt = static_cast<double>(trials);
  c.violation_fraction = static_cast<double>(violations) / tt;
  c.allowed = epsilon + 3.0 * std::sqrt(epsilon * (1.0 - epsilon) / tt);
  c.passed = c.violation_fraction <= c.allowed;
  return c;
}

KlLemmaCheck kl_lemma_check(std::size_t count, std::uint64_t seed) {
  KlLemmaCheck c;
  c.worst_slack = std::numeric_limits<double>::infinity();
  std::size_t attempt = 0;
  while (c.cases < count) {
    Rng rng(seed, attempt++);
    const std::size_t d = 1 + rng.index(4);
    const std::size_t L = 3 + rng.index(3);
    const std::size_t D = 1 + rng.index(6);
    const double cb = rng.uniform(2.0, 5.0);
    const std::size_t T = count_params(d, L, D);
    const std::size_t S = 1 + rng.index(T);
    const Architecture arch(d, L, D, S, cb);
    const SparseParams center = sample_prior(arch, rng);
    const double preferred = cb * std::exp(rng.uniform(std::log(1e-6), 0.0));
    const double radius = max_nested_radius(center, preferred);
    if (!(radius > 0.0)) continue;
    const BoxPosterior q(center, radius);
    const double exact = kl_box_to_prior(q);
    const double bound = kl_box_bound(q);
    const double slack = bound - exact;
    c.worst_slack = std::min(c.worst_slack, slack);
    if (slack < -1e-9 * std::max(1.0, std::abs(exact))) ++c.violations;
    ++c.cases;
  }
  c.passed = c.violations == 0;
  return c;
}

MarginCheck margin_condition_check(const SparseParams& teacher, double margin_constant,
                                   std::size_t prior_draws, std::size_t points,
                                   std::uint64_t seed) {
  if (!(margin_constant >= 1.0)) throw DomainError("low-noise constant C must be >= 1");
  if (points < 2) throw ConfigError("need at least 2 probe points");
  const Architecture& arch = teacher.arch();
  const std::size_t d = arch.input_dim();
  std::vector<double> xs(points * d);
  Rng probe(seed, 0);
  for (double& v : xs) v = probe.uniform(-1.0, 1.0);
  const CompiledNetwork g(teacher);
  std::vector<double> star(points);
  for (std::size_t i = 0; i < points; ++i) star[i] = g(std::span<const double>(xs).subspan(i * d, d));

  MarginCheck c;
  c.draws = prior_draws;
  std::vector<double> gap(points);
  for (std::size_t j = 0; j < prior_draws; ++j) {
    Rng rng(seed, j + 1);
    const CompiledNetwork f(sample_prior(arch, rng));
    double sq = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      const double y = classify_output(star[i]);
      const double u = ((y * f(std::span<const double>(xs).subspan(i * d, d)) <= 0.0) ? 1.0 : 0.0) -
                       ((y * star[i] <= 0.0) ? 1.0 : 0.0);
      sq += u * u;
      lin += u;
      gap[i] = u * u - margin_constant * u;
    }
    const MeanSe m = mean_and_se(gap);
    if (m.mean > 3.0 * m.se) ++c.flagged;
    if (lin > 0.0) c.worst_ratio = std::max(c.worst_ratio, sq / (margin_constant * lin));
  }
  return c;
}

bool Scorecard::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.flag_only || c.passed; });
}

Scorecard run_lemma_battery(std::uint64_t seed) {
  Scorecard card;
  card.seed = seed;
  auto& out = card.checks;

  {
    double worst_gap = 0.0;
    double worst_excess = kNegInf;
    for (std::size_t s = 0; s < 50; ++s) {
      Rng rng(derive_seed(seed, 1), s);
      const std::size_t k = 1 + rng.index(10);
      std::vector<double> mu(k);
      std::vector<double> h(k);
      for (double& m : mu) m = rng.bernoulli(0.1) ? 0.0 : rng.uniform01();
      if (std::accumulate(mu.begin(), mu.end(), 0.0) == 0.0) mu[0] = 1.0;
      const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
      for (double& m : mu) m /= total;
      for (double& v : h) v = rng.uniform(-30.0, 30.0);
      const DvResult r = dv_check(mu, h);
      worst_gap = std::max(worst_gap, r.gap);
      worst_excess = std::max(worst_excess, r.grid_max - r.lhs);
    }
    out.push_back({"dv_gap", worst_gap, 1e-12, worst_gap <= 1e-12, false,
                   "max |log E e^h - variational value at the Gibbs measure| over 50 spaces"});
    out.push_back({"dv_grid", worst_excess, 1e-9, worst_excess <= 1e-9, false,
                   "max over simplex-grid measures of value - log E e^h"});
  }

  {
    struct Point {
      BoundedVariable u;
      std::size_t n;
      double lambda;
    };
    const std::vector<Point> grid = {
        {rademacher_variable(), 16, 4.0},           {rademacher_variable(), 64, 8.0},
        {rademacher_variable(), 16, 8.0},           {uniform_symmetric_variable(), 16, 8.0},
        {uniform_symmetric_variable(), 16, 4.0},    {uniform_symmetric_variable(), 64, 8.0},
        {zero_variable(), 16, 4.0},                 {centered_bernoulli_variable(0.1), 16, 4.0},
        {centered_bernoulli_variable(0.3), 32, 8.0}, {centered_bernoulli_variable(0.5), 16, 6.0}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& p = grid[i];
      const MgfCheck c = hoeffding_check(p.lambda, p.n, p.u, 20000, derive_seed(seed, 100 + i));
      out.push_back({"hoeffding[" + p.u.name + ",n=" + std::to_string(p.n) + ",lambda=" +
                         fmt(p.lambda) + "]",
                     c.estimate, c.bound, c.passed, false,
                     "MC se " + fmt(c.std_error) + (c.exact ? ", exact " + fmt(*c.exact) : "")});
    }
    std::size_t violations = 0;
    for (std::size_t n = 1; n <= 1000; ++n) {
      const double nn = static_cast<double>(n);
      if (nn * std::log(std::cosh(1.0 / std::sqrt(nn))) > 0.5) ++violations;
    }
    out.push_back({"hoeffding_rademacher_closed_form", static_cast<double>(violations), 0.0,
                   violations == 0, false, "n * log cosh(1/sqrt(n)) <= 1/2 for n = 1..1000"});
  }

  {
    const Architecture arch(2, 3, 3, 6);
    const SparseParams teacher = draw_balanced_teacher(arch, derive_seed(seed, 2));
    std::size_t i = 0;
    for (double p : {0.05, 0.2, 0.5}) {
      for (double zeta : {0.25, 0.5, 0.9}) {
        const std::size_t n = 16;
        const BoundedVariable u = bernoulli_variable(p);
        const BernsteinCheck c =
            bernstein_check(zeta, static_cast<double>(n) * p, 1.0, n, u, 20000, derive_seed(seed, 200 + i++));
        out.push_back({"bernstein[" + u.name + ",zeta=" + fmt(zeta) + "]", c.mgf.estimate,
                       c.mgf.bound, c.mgf.passed, false,
                       "MC se " + fmt(c.mgf.std_error) + ", moments " + (c.moments_ok ? "ok" : "violated")});
      }
    }
    // a second balanced network; raw prior draws are often constant
    const SparseParams theta = draw_balanced_teacher(arch, derive_seed(seed, 3));
    const BoundedVariable u = excess_loss_variable(theta, teacher, derive_seed(seed, 4));
    const std::size_t n = 16;
    const double v = std::max(static_cast<double>(n) * u.mean, 1e-12);
    const BernsteinCheck c = bernstein_check(0.5, v, 1.0, n, u, 20000, derive_seed(seed, 210));
    out.push_back({"bernstein[teacher-excess-loss,zeta=0.5]", c.mgf.estimate, c.mgf.bound,
                   c.mgf.passed, false,
                   "E U = " + fmt(u.mean) + ", moments " + (c.moments_ok ? "ok" : "violated")});
  }

  {
    std::size_t violations = 0;
    double worst_ratio = 0.0;
    for (std::size_t t = 0; t < 1000; ++t) {
      Rng rng(derive_seed(seed, 5), t);
      const std::size_t d = 1 + rng.index(3);
      const std::size_t L = 3 + rng.index(2);
      const std::size_t D = 1 + rng.index(4);
      const double cb = rng.uniform(2.0, 3.0);
      const std::size_t T = count_params(d, L, D);
      const Architecture arch(d, L, D, 1 + rng.index(T), cb);
      const SparseParams a = sample_prior(arch, rng);
      const SparseParams b = sample_prior(arch, rng);
      std::vector<double> xs(200 * d);
      for (double& v : xs) v = rng.uniform(-1.0, 1.0);
      const PerturbationCheck c = perturbation_check(a, b, xs);
      if (!c.passed) ++violations;
      if (c.lemma_bound > 0.0) worst_ratio = std::max(worst_ratio, c.max_diff / c.lemma_bound);
    }
    out.push_back({"perturbation", static_cast<double>(violations), 0.0, violations == 0, false,
                   "1000 pairs x 200 inputs; worst |f - f*| / bound = " + fmt(worst_ratio)});
  }

  {
    const Lemma1Check c = lemma1_check(0.1, 500, 0.05, 1.0, 2000, derive_seed(seed, 6));
    out.push_back({"oracle_risk_concentration", c.violation_fraction, c.allowed, c.passed, false,
                   "R* = 0.1, n = 500, eps = 0.05, varsigma = 1, bound " + fmt(c.bound)});
  }

  {
    const KlLemmaCheck c = kl_lemma_check(100, derive_seed(seed, 7));
    out.push_back({"box_kl_bound", static_cast<double>(c.violations), 0.0, c.passed, false,
                   "100 random boxes; min slack " + fmt(c.worst_slack)});
  }

  {
    const Architecture arch(2, 3, 3, 6);
    const SparseParams teacher = draw_balanced_teacher(arch, derive_seed(seed, 2));
    const MarginCheck c = margin_condition_check(teacher, 1.0, 50, 2000, derive_seed(seed, 8));
    out.push_back({"low_noise_condition", static_cast<double>(c.flagged), 0.0, c.flagged == 0, true,
                   "noiseless teacher, C = 1, 50 prior draws; worst ratio " + fmt(c.worst_ratio)});
  }
  return card;
}

}  // namespace sparsepac
