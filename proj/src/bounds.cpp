#include "sparsepac/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparsepac/errors.hpp"

namespace sparsepac {
namespace {

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
}

void check_c_user(double c_user) {
  if (!(std::isfinite(c_user) && c_user > 0.0)) throw DomainError("c_user must be positive");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

const char* to_string(RateMode mode) {
  switch (mode) {
    case RateMode::slow:
      return "slow";
    case RateMode::fast:
      return "fast";
    case RateMode::certificate:
      return "certificate";
  }
  return "unknown";
}

double complexity_term(const Architecture& arch, std::size_t n) {
  if (n < 1) throw DomainError("complexity_term requires n >= 1");
  if (arch.width() < 2) throw DomainError("complexity_term requires D >= 2 (divides by D - 1)");
  if (arch.input_dim() > arch.width()) throw DomainError("complexity_term requires d <= D");
  const double S = static_cast<double>(arch.sparsity());
  const double T = static_cast<double>(arch.num_params());
  const double D = static_cast<double>(arch.width());
  const double L = static_cast<double>(arch.depth());
  const double d = static_cast<double>(arch.input_dim());
  const double log_arg = std::log(static_cast<double>(n)) + std::log(T) + L * std::log(D) +
                         std::log((d + 1.0) * L + 1.0) - std::log(S) - std::log(D - 1.0);
  return S * log_arg;
}

double slow_rate_lambda(std::size_t n) { return std::sqrt(static_cast<double>(n)); }

double fast_rate_lambda(std::size_t n, double margin_constant) {
  if (!(margin_constant >= 1.0)) throw DomainError("low-noise constant C must be >= 1");
  return 2.0 * static_cast<double>(n) / (3.0 * margin_constant + 2.0);
}

BoundReport slow_rate_bound(const Architecture& arch, std::size_t n, double epsilon, double c_user) {
  check_epsilon(epsilon);
  check_c_user(c_user);
  BoundReport r;
  r.rate_mode = RateMode::slow;
  r.epsilon = epsilon;
  r.c_user = c_user;
  r.lambda_used = slow_rate_lambda(n);
  r.complexity_term = complexity_term(arch, n);
  r.confidence_term = std::log(1.0 / epsilon);
  const double root_n = std::sqrt(static_cast<double>(n));
  r.total = c_user * (r.complexity_term + r.confidence_term) / root_n;
  r.terms = {{"complexity/sqrt(n)", c_user * r.complexity_term / root_n, 0.0},
             {"log(1/eps)/sqrt(n)", c_user * r.confidence_term / root_n, 0.0}};
  r.notes = {
      "holds with probability >= 1 - 2 eps; the full statement adds (1 + 2C')R*",
      "c_user=" + fmt(c_user) + " stands in for an unspecified constant depending on C_B and C'; "
      "it is a knob, not a derived value",
      "oracle term (1 + 2C')R* is 0 for noiseless teacher data",
      "pre-simplified form carries C' log(1/eps) / (n * varsigma); varsigma = 1 when reconstructed"};
  return r;
}

BoundReport fast_rate_bound(const Architecture& arch, std::size_t n, double epsilon,
                            double margin_constant, double c_user) {
  check_epsilon(epsilon);
  check_c_user(c_user);
  if (!(margin_constant >= 1.0)) throw DomainError("low-noise constant C must be >= 1");
  BoundReport r;
  r.rate_mode = RateMode::fast;
  r.epsilon = epsilon;
  r.c_user = c_user;
  r.lambda_used = fast_rate_lambda(n, margin_constant);
  r.complexity_term = complexity_term(arch, n);
  r.confidence_term = std::log(1.0 / epsilon);
  const double nn = static_cast<double>(n);
  r.total = c_user * (r.complexity_term + r.confidence_term) / nn;
  r.terms = {{"complexity/n", c_user * r.complexity_term / nn, 0.0},
             {"log(1/eps)/n", c_user * r.confidence_term / nn, 0.0}};
  r.notes = {
      "holds with probability >= 1 - 2 eps; the full statement adds (1 + 3C')R*",
      "c_user=" + fmt(c_user) + " stands in for an unspecified constant depending on C, C' and "
      "C_B; it is a knob, not a derived value",
      "low-noise constant C=" + fmt(margin_constant) + " (C=1 in the noiseless case, lambda=2n/5)",
      "oracle term (1 + 3C')R* is 0 for noiseless teacher data",
      "pre-simplified form carries C' log(1/eps) / (n * varsigma); varsigma = 1 when reconstructed"};
  return r;
}

BoundReport empirical_certificate(const Dataset& data, const CertificatePosterior& posterior,
                                  double lambda, double epsilon, std::size_t n_mc,
                                  std::uint64_t seed, const Activation& act) {
  check_epsilon(epsilon);
  if (!(std::isfinite(lambda) && lambda > 0.0)) throw DomainError("lambda must be positive");
  if (n_mc < 1) throw ConfigError("n_mc must be positive");

  double risk = 0.0;
  double risk_se = 0.0;
  double kl = 0.0;
  double kl_se = 0.0;
  std::vector<std::string> notes;

  if (const auto* box = std::get_if<BoxCertificateInput>(&posterior)) {
    if (box->posterior.center().arch().input_dim() != data.dim()) {
      throw ConfigError("posterior and data disagree on d");
    }
    Rng rng(seed, 0);
    std::vector<double> risks(n_mc);
    for (double& v : risks) v = zero_one_risk(sample_box(box->posterior, rng), data, act);
    const TraceSummary s = batch_means(risks, std::vector<std::size_t>{risks.size()});
    risk = s.mean;
    risk_se = s.std_error;
    kl = kl_box_to_prior(box->posterior);
    notes.push_back("posterior: uniform box of radius " + fmt(box->posterior.radius()) +
                    "; KL is exact");
  } else {
    const auto& gibbs = std::get<GibbsCertificateInput>(posterior);
    if (gibbs.chain == nullptr) throw ConfigError("Gibbs certificate needs a chain result");
    const ChainResult& chain = *gibbs.chain;
    if (chain.draws.empty()) throw ConfigError("Gibbs certificate needs kept draws");
    if (!same_lambda(chain.config.lambda, lambda) || !same_lambda(gibbs.log_partition.lambda, lambda)) {
      throw ConfigError("chain, log-partition estimate and certificate must share lambda");
    }
    std::vector<double> risks;
    for (std::size_t i : evenly_spaced_draws(chain.draws.size(), n_mc)) {
      risks.push_back(zero_one_risk(chain.draws[i], data, act));
    }
    const TraceSummary s = batch_means(risks, std::vector<std::size_t>{risks.size()});
    risk = s.mean;
    risk_se = s.std_error;
    const double raw_kl = -lambda * chain.mean_hinge - gibbs.log_partition.log_z;
    kl_se = std::hypot(lambda * chain.mean_hinge_se, gibbs.log_partition.std_error);
    if (raw_kl < -3.0 * kl_se) {
      throw EstimationError("estimated KL " + fmt(raw_kl) + " is negative beyond 3 standard errors (" +
                            fmt(kl_se) + "); the thermodynamic integration run is unreliable");
    }
    kl = std::max(raw_kl, 0.0);
    notes.push_back("posterior: Gibbs chain at lambda=" + fmt(lambda) +
                    "; KL = -lambda E[r_n^h] - log Z estimated by thermodynamic integration");
    if (raw_kl < 0.0) notes.push_back("raw KL estimate " + fmt(raw_kl) + " clamped to 0");
  }

  const double n = static_cast<double>(data.size());
  BoundReport r;
  r.rate_mode = RateMode::certificate;
  r.epsilon = epsilon;
  r.lambda_used = lambda;
  r.c_user = 1.0;
  r.complexity_term = kl;
  r.confidence_term = std::log(1.0 / epsilon);
  const double kl_part = kl / lambda;
  const double conf_part = r.confidence_term / lambda;
  const double hoeffding = lambda / (8.0 * n);
  r.terms = {{"empirical 0-1 risk", risk, risk_se},
             {"KL/lambda", kl_part, kl_se / lambda},
             {"log(1/eps)/lambda", conf_part, 0.0},
             {"lambda/(8n)", hoeffding, 0.0}};
  r.total = risk + kl_part + conf_part + hoeffding;
  r.total_std_error = std::hypot(risk_se, kl_se / lambda);
  notes.push_back(
      "Hoeffding term lambda/(8n) uses range 1 for 0-1 losses; the theorem proofs use lambda/(2n) "
      "for the centered difference of two 0-1 losses (range 2)");
  notes.push_back("valid with probability >= 1 - eps over the sample, simultaneously for all "
                  "posteriors at this fixed lambda");
  r.notes = std::move(notes);
  return r;
}

}  // namespace sparsepac
