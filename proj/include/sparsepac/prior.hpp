#pragma once

#include <cstddef>

#include "sparsepac/network.hpp"
#include "sparsepac/rng.hpp"

namespace sparsepac {

// Support of an active coefficient: the continuous interval [-C_B, C_B], or
// `levels` equispaced points spanning it (used for exactly enumerable toys).
struct Slab {
  std::size_t levels = 0;  // 0 = continuous

  static Slab continuous() { return {}; }
  static Slab quantized(std::size_t levels);

  bool is_quantized() const noexcept { return levels != 0; }
  // j-th grid point, j in [0, levels).
  double level_value(std::size_t j, double coef_bound) const;
  // Index of the grid point equal to value; throws ConfigError off-grid.
  std::size_t level_index(double value, double coef_bound) const;

  bool operator==(const Slab&) const = default;
};

// log C(n, k) through lgamma.
double log_binomial(std::size_t n, std::size_t k);

// Draw from the exact-S spike-and-slab prior: mask uniform over the C(T,S)
// masks, active values uniform on the slab, inactive values 0.
SparseParams sample_prior(const Architecture& arch, Rng& rng, Slab slab = {});

// Log-density of the prior against counting measure on masks times Lebesgue
// (continuous slab) or counting (quantized slab) measure on the active values.
// Constant on the support: -log C(T,S) - S log(2 C_B), or -S log(levels).
double log_prior(const SparseParams& params, Slab slab = {});

// Product of uniform boxes of half-width `radius` around the active
// coordinates of `center`, with the center's mask. Every box must fit inside
// [-C_B, C_B].
class BoxPosterior {
 public:
  BoxPosterior(SparseParams center, double radius);

  const SparseParams& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

 private:
  SparseParams center_;
  double radius_;
};

SparseParams sample_box(const BoxPosterior& q, Rng& rng);

// Exact KL(q || prior) = log C(T,S) + S log(C_B / radius).
double kl_box_to_prior(const BoxPosterior& q);

// Upper bound S log(T C_B) + (S/2) log(1 / radius^2) on the same KL.
double kl_box_bound(const BoxPosterior& q);

// Radius (S/n) / [(C_B D)^L / (C_B D - 1) * ((d+1) L + 1)], computed in
// log-space and floored at 1e-300 (with a warning). Requires C_B * D > 1.
double default_box_radius(const Architecture& arch, std::size_t n);

// Largest radius <= preferred for which the box around center still nests in
// [-C_B, C_B]; zero when some active center value sits on the boundary.
double max_nested_radius(const SparseParams& center, double preferred);

}  // namespace sparsepac
