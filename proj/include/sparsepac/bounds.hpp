#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sparsepac/network.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/sampler.hpp"

namespace sparsepac {

enum class RateMode : std::uint8_t { slow, fast, certificate };

const char* to_string(RateMode mode);

struct BoundTerm {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;  // Monte-Carlo error, 0 for closed-form terms
};

// Itemized bound. For the theorem evaluators `total` is the R*-free part
// only; oracle terms are listed in `notes`.
struct BoundReport {
  RateMode rate_mode = RateMode::slow;
  double complexity_term = 0.0;
  double confidence_term = 0.0;
  double epsilon = 0.05;
  double lambda_used = 0.0;
  double c_user = 1.0;
  double total = 0.0;
  double total_std_error = 0.0;
  std::vector<BoundTerm> terms;
  std::vector<std::string> notes;
};

// S log(n T D^L ((d+1) L + 1) / (S (D - 1))), evaluated in log-space.
// Requires D >= 2 and d <= D; throws DomainError otherwise.
double complexity_term(const Architecture& arch, std::size_t n);

// c_user (complexity + log(1/eps)) / sqrt(n), at lambda = sqrt(n).
BoundReport slow_rate_bound(const Architecture& arch, std::size_t n, double epsilon,
                            double c_user = 1.0);

// c_user (complexity + log(1/eps)) / n, at lambda = 2n / (3C + 2). C is the
// low-noise constant (>= 1; 1 in the noiseless case).
BoundReport fast_rate_bound(const Architecture& arch, std::size_t n, double epsilon,
                            double margin_constant = 1.0, double c_user = 1.0);

double slow_rate_lambda(std::size_t n);
double fast_rate_lambda(std::size_t n, double margin_constant = 1.0);

// Box posterior; the 0-1 risk integral is estimated from n_mc box draws.
struct BoxCertificateInput {
  BoxPosterior posterior;
};

// Gibbs posterior sampled at lambda, with a thermodynamic-integration
// estimate of log Z(lambda) for the same data and lambda.
struct GibbsCertificateInput {
  const ChainResult* chain = nullptr;
  ThermoEstimate log_partition;
};

using CertificatePosterior = std::variant<BoxCertificateInput, GibbsCertificateInput>;

// High-probability (>= 1 - eps) bound on the posterior-averaged
// misclassification risk:
//   int R drho <= int r_n drho + (KL(rho, pi) + log(1/eps)) / lambda + lambda / (8n).
// Box posteriors use the exact KL; Gibbs posteriors use
// KL = -lambda E[r_n^h] - log Z(lambda). Throws EstimationError when that
// estimate is below zero by more than 3 standard errors.
BoundReport empirical_certificate(const Dataset& data, const CertificatePosterior& posterior,
                                  double lambda, double epsilon, std::size_t n_mc,
                                  std::uint64_t seed, const Activation& act = Activation::relu());

}  // namespace sparsepac
