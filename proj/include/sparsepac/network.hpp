#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sparsepac {

// Total coefficient count of a fully connected network with input dimension
// d, L layers (excluding the input) and hidden width D: sum over layers of
// D_l * (D_{l-1} + 1) with D_0 = d and D_L = 1. Throws ConfigError on invalid
// dimensions or overflow.
std::size_t count_params(std::size_t input_dim, std::size_t depth, std::size_t width);

// Shape and sparsity budget of a network: (d, L, D, S, C_B) plus the derived
// coefficient count T.
class Architecture {
 public:
  // Validates d >= 1, L >= 3, D >= 1, 1 <= S <= T and C_B >= 2.
  Architecture(std::size_t input_dim, std::size_t depth, std::size_t width,
               std::size_t sparsity, double coef_bound = 2.0);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t sparsity() const noexcept { return sparsity_; }
  double coef_bound() const noexcept { return coef_bound_; }
  std::size_t num_params() const noexcept { return num_params_; }

  // D_l for l in [0, L]: d at the input, 1 at the output, D in between.
  std::size_t layer_width(std::size_t layer) const;

  // First flat index belonging to layer l (1-based); layer_offset(L+1) == T.
  std::size_t layer_offset(std::size_t layer) const;

  // Same architecture with a different sparsity level.
  Architecture with_sparsity(std::size_t sparsity) const;

  std::string to_string() const;

  bool operator==(const Architecture&) const = default;

 private:
  std::size_t input_dim_;
  std::size_t depth_;
  std::size_t width_;
  std::size_t sparsity_;
  double coef_bound_;
  std::size_t num_params_;
};

enum class CoordKind : std::uint8_t { matrix, bias };

// Position of one coefficient: entry (row, col) of A_l or entry row of b_l.
struct CoordAddress {
  std::size_t layer = 1;
  CoordKind kind = CoordKind::matrix;
  std::size_t row = 0;
  std::optional<std::size_t> col;  // absent for biases

  bool operator==(const CoordAddress&) const = default;
};

// Canonical flat layout: layers in order; within a layer all entries of A_l
// row-major, then b_l.
CoordAddress index_to_coord(const Architecture& arch, std::size_t index);
std::size_t coord_to_index(const Architecture& arch, const CoordAddress& coord);

// Stacked coefficients with an exact-S support mask. Immutable; the sampler
// derives new states through the with_* copy-and-modify helpers.
class SparseParams {
 public:
  // Every listed index becomes active (value may be 0). Throws ConfigError
  // unless exactly S distinct indices in [0, T) are given with |value| <= C_B.
  static SparseParams from_active(const Architecture& arch,
                                  std::span<const std::pair<std::size_t, double>> active);

  // Dense form. values must vanish wherever mask is 0.
  static SparseParams from_dense(const Architecture& arch, std::vector<std::uint8_t> mask,
                                 std::vector<double> values);

  const Architecture& arch() const noexcept { return arch_; }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  std::span<const double> values() const noexcept { return values_; }
  // Active indices in increasing order.
  std::span<const std::size_t> active() const noexcept { return active_; }

  bool is_active(std::size_t index) const { return mask_.at(index) != 0; }
  double value(std::size_t index) const { return values_.at(index); }

  // Copy with the active coordinate `index` set to `value`.
  SparseParams with_value(std::size_t index, double value) const;

  // Copy with `from` deactivated (value 0) and the inactive `to` activated
  // with `value`.
  SparseParams with_swap(std::size_t from, std::size_t to, double value) const;

  bool operator==(const SparseParams&) const = default;

 private:
  SparseParams(Architecture arch, std::vector<std::uint8_t> mask, std::vector<double> values,
               std::vector<std::size_t> active)
      : arch_(std::move(arch)),
        mask_(std::move(mask)),
        values_(std::move(values)),
        active_(std::move(active)) {}

  void validate() const;

  Architecture arch_;
  std::vector<std::uint8_t> mask_;
  std::vector<double> values_;
  std::vector<std::size_t> active_;
};

// Componentwise activation. Only maps with |rho(u)| <= |u| are admitted.
class Activation {
 public:
  using Fn = double (*)(double);

  static Activation relu();
  static Activation identity();
  // Throws ConfigError unless satisfies_activation_gate(fn).
  static Activation custom(std::string name, Fn fn);

  double operator()(double u) const { return fn_(u); }
  const std::string& name() const noexcept { return name_; }

 private:
  Activation(std::string name, Fn fn) : name_(std::move(name)), fn_(fn) {}
  std::string name_;
  Fn fn_;
};

// True if |fn(u)| <= |u| on every probe point, up to a few ulps of rounding.
bool satisfies_activation_gate(Activation::Fn fn);

// Network flattened into per-layer sparse edge lists. Building one costs
// O(S); evaluating costs O(S + L*D) per input. Inputs are not validated.
class CompiledNetwork {
 public:
  explicit CompiledNetwork(const SparseParams& params, Activation act = Activation::relu());

  double operator()(std::span<const double> x) const;

  std::size_t input_dim() const noexcept { return input_dim_; }

 private:
  struct Edge {
    std::uint32_t row;
    std::uint32_t col;
    double weight;
  };
  struct Bias {
    std::uint32_t row;
    double value;
  };
  struct Layer {
    std::size_t out_dim;
    std::vector<Edge> edges;
    std::vector<Bias> biases;
  };

  std::size_t input_dim_;
  std::size_t max_width_;
  Activation act_;
  std::vector<Layer> layers_;
};

// f_theta(x). Throws ConfigError on a dimension mismatch and InputError when
// x leaves [-1,1]^d.
double forward(const SparseParams& params, std::span<const double> x,
               const Activation& act = Activation::relu());

// Decision rule sign(f_theta(x)) with sign(0) = -1.
int classify_output(double output) noexcept;
int classify(const SparseParams& params, std::span<const double> x,
             const Activation& act = Activation::relu());

// Uniform bound on |f_theta(x)| over [-1,1]^d and all theta in the parameter
// set, obtained from the layer-perturbation inequality against the zero
// network. Requires C_B * D > 1.
double output_magnitude_bound(const Architecture& arch);

}  // namespace sparsepac
