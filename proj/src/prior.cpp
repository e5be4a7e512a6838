#include "sparsepac/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sparsepac/errors.hpp"
#include "sparsepac/log.hpp"

namespace sparsepac {

Slab Slab::quantized(std::size_t levels) {
  if (levels < 2) throw ConfigError("a quantized slab needs at least 2 levels");
  return Slab{levels};
}

double Slab::level_value(std::size_t j, double coef_bound) const {
  if (!is_quantized() || j >= levels) throw IndexError("slab level out of range");
  return -coef_bound + 2.0 * coef_bound * static_cast<double>(j) / static_cast<double>(levels - 1);
}

std::size_t Slab::level_index(double value, double coef_bound) const {
  if (!is_quantized()) throw ConfigError("continuous slab has no levels");
  const double spacing = 2.0 * coef_bound / static_cast<double>(levels - 1);
  const double pos = (value + coef_bound) / spacing;
  const double rounded = std::round(pos);
  if (rounded < 0.0 || rounded > static_cast<double>(levels - 1) ||
      std::abs(pos - rounded) > 1e-9) {
    throw ConfigError("value is not on the quantized slab grid");
  }
  return static_cast<std::size_t>(rounded);
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) throw ConfigError("log_binomial: k > n");
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
}

SparseParams sample_prior(const Architecture& arch, Rng& rng, Slab slab) {
  const std::size_t T = arch.num_params();
  const std::size_t S = arch.sparsity();
  if (S > T) throw ConfigError("sparsity exceeds coefficient count");
  // Partial Fisher-Yates: the first S slots are a uniform S-subset.
  std::vector<std::size_t> perm(T);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < S; ++i) std::swap(perm[i], perm[i + rng.index(T - i)]);
  std::vector<std::size_t> chosen(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(S));
  std::sort(chosen.begin(), chosen.end());

  const double cb = arch.coef_bound();
  std::vector<std::uint8_t> mask(T, 0);
  std::vector<double> values(T, 0.0);
  for (std::size_t t : chosen) {
    mask[t] = 1;
    values[t] = slab.is_quantized() ? slab.level_value(rng.index(slab.levels), cb)
                                    : rng.uniform(-cb, cb);
  }
  return SparseParams::from_dense(arch, std::move(mask), std::move(values));
}

double log_prior(const SparseParams& params, Slab slab) {
  const Architecture& arch = params.arch();
  const double S = static_cast<double>(arch.sparsity());
  if (slab.is_quantized()) {
    for (std::size_t t : params.active()) slab.level_index(params.value(t), arch.coef_bound());
    return -log_binomial(arch.num_params(), arch.sparsity()) -
           S * std::log(static_cast<double>(slab.levels));
  }
  return -log_binomial(arch.num_params(), arch.sparsity()) - S * std::log(2.0 * arch.coef_bound());
}

BoxPosterior::BoxPosterior(SparseParams center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(std::isfinite(radius) && radius > 0.0)) {
    throw ConfigError("box radius must be positive and finite");
  }
  const double cb = center_.arch().coef_bound();
  for (std::size_t t : center_.active()) {
    const double c = center_.value(t);
    if (c - radius < -cb || c + radius > cb) {
      throw ConfigError("box around coordinate " + std::to_string(t) +
                        " leaves [-C_B, C_B]; shrink the radius");
    }
  }
}

SparseParams sample_box(const BoxPosterior& q, Rng& rng) {
  const SparseParams& c = q.center();
  std::vector<double> values(c.values().begin(), c.values().end());
  std::vector<std::uint8_t> mask(c.mask().begin(), c.mask().end());
  const double cb = c.arch().coef_bound();
  for (std::size_t t : c.active()) {
    const double v = rng.uniform(values[t] - q.radius(), values[t] + q.radius());
    values[t] = std::clamp(v, -cb, cb);  // guards one-ulp rounding at the edge
  }
  return SparseParams::from_dense(c.arch(), std::move(mask), std::move(values));
}

double kl_box_to_prior(const BoxPosterior& q) {
  const Architecture& arch = q.center().arch();
  return log_binomial(arch.num_params(), arch.sparsity()) +
         static_cast<double>(arch.sparsity()) * std::log(arch.coef_bound() / q.radius());
}

double kl_box_bound(const BoxPosterior& q) {
  const Architecture& arch = q.center().arch();
  const double S = static_cast<double>(arch.sparsity());
  const double T = static_cast<double>(arch.num_params());
  return S * std::log(T * arch.coef_bound()) +
         0.5 * S * std::log(1.0 / (q.radius() * q.radius()));
}

double default_box_radius(const Architecture& arch, std::size_t n) {
  const double cd = arch.coef_bound() * static_cast<double>(arch.width());
  if (!(cd > 1.0)) throw ConfigError("default_box_radius requires C_B * D > 1");
  if (n == 0) throw ConfigError("sample size must be positive");
  const double d = static_cast<double>(arch.input_dim());
  const double L = static_cast<double>(arch.depth());
  const double log_radius = std::log(static_cast<double>(arch.sparsity())) -
                            std::log(static_cast<double>(n)) - L * std::log(cd) +
                            std::log(cd - 1.0) - std::log((d + 1.0) * L + 1.0);
  constexpr double kFloor = 1e-300;
  if (log_radius < std::log(kFloor)) {
    warn("default box radius underflows; clamped to 1e-300");
    return kFloor;
  }
  return std::exp(log_radius);
}

double max_nested_radius(const SparseParams& center, double preferred) {
  double r = preferred;
  const double cb = center.arch().coef_bound();
  for (std::size_t t : center.active()) r = std::min(r, cb - std::abs(center.value(t)));
  return std::max(r, 0.0);
}

}  // namespace sparsepac
