#include "sparsepac/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sparsepac/errors.hpp"

namespace sparsepac {
namespace {

std::size_t checked_mul(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw ConfigError("coefficient count overflows");
  return out;
}

std::size_t checked_add(std::size_t a, std::size_t b) {
  std::size_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw ConfigError("coefficient count overflows");
  return out;
}

double relu_fn(double u) { return u > 0.0 ? u : 0.0; }
double identity_fn(double u) { return u; }

}  // namespace

std::size_t count_params(std::size_t input_dim, std::size_t depth, std::size_t width) {
  if (input_dim < 1) throw ConfigError("input dimension d must be >= 1");
  if (depth < 3) throw ConfigError("depth L must be >= 3");
  if (width < 1) throw ConfigError("width D must be >= 1");
  std::size_t total = 0;
  std::size_t prev = input_dim;
  for (std::size_t layer = 1; layer <= depth; ++layer) {
    const std::size_t cur = layer == depth ? 1 : width;
    total = checked_add(total, checked_mul(cur, checked_add(prev, 1)));
    prev = cur;
  }
  return total;
}

Architecture::Architecture(std::size_t input_dim, std::size_t depth, std::size_t width,
                           std::size_t sparsity, double coef_bound)
    : input_dim_(input_dim),
      depth_(depth),
      width_(width),
      sparsity_(sparsity),
      coef_bound_(coef_bound),
      num_params_(count_params(input_dim, depth, width)) {
  if (!(std::isfinite(coef_bound) && coef_bound >= 2.0)) {
    throw ConfigError("coefficient bound C_B must be finite and >= 2");
  }
  if (sparsity < 1 || sparsity > num_params_) {
    throw ConfigError("sparsity S must lie in [1, T]; got S=" + std::to_string(sparsity) +
                      ", T=" + std::to_string(num_params_));
  }
}

std::size_t Architecture::layer_width(std::size_t layer) const {
  if (layer > depth_) throw IndexError("layer index out of range");
  if (layer == 0) return input_dim_;
  if (layer == depth_) return 1;
  return width_;
}

std::size_t Architecture::layer_offset(std::size_t layer) const {
  if (layer < 1 || layer > depth_ + 1) throw IndexError("layer index out of range");
  std::size_t offset = 0;
  for (std::size_t l = 1; l < layer; ++l) offset += layer_width(l) * (layer_width(l - 1) + 1);
  return offset;
}

Architecture Architecture::with_sparsity(std::size_t sparsity) const {
  return Architecture(input_dim_, depth_, width_, sparsity, coef_bound_);
}

std::string Architecture::to_string() const {
  std::ostringstream os;
  os << "d=" << input_dim_ << " L=" << depth_ << " D=" << width_ << " S=" << sparsity_
     << " C_B=" << coef_bound_ << " T=" << num_params_;
  return os.str();
}

CoordAddress index_to_coord(const Architecture& arch, std::size_t index) {
  if (index >= arch.num_params()) {
    throw IndexError("flat index " + std::to_string(index) + " outside [0, " +
                     std::to_string(arch.num_params()) + ")");
  }
  std::size_t offset = 0;
  for (std::size_t layer = 1; layer <= arch.depth(); ++layer) {
    const std::size_t rows = arch.layer_width(layer);
    const std::size_t cols = arch.layer_width(layer - 1);
    const std::size_t matrix_size = rows * cols;
    if (index < offset + matrix_size) {
      const std::size_t r = index - offset;
      return {layer, CoordKind::matrix, r / cols, r % cols};
    }
    if (index < offset + matrix_size + rows) {
      return {layer, CoordKind::bias, index - offset - matrix_size, std::nullopt};
    }
    offset += matrix_size + rows;
  }
  throw IndexError("unreachable flat index");
}

std::size_t coord_to_index(const Architecture& arch, const CoordAddress& coord) {
  if (coord.layer < 1 || coord.layer > arch.depth()) throw IndexError("layer out of range");
  const std::size_t rows = arch.layer_width(coord.layer);
  const std::size_t cols = arch.layer_width(coord.layer - 1);
  if (coord.row >= rows) throw IndexError("row out of range");
  const std::size_t offset = arch.layer_offset(coord.layer);
  if (coord.kind == CoordKind::matrix) {
    if (!coord.col || *coord.col >= cols) throw IndexError("column out of range");
    return offset + coord.row * cols + *coord.col;
  }
  if (coord.col) throw IndexError("bias coordinates carry no column");
  return offset + rows * cols + coord.row;
}

// ---------------------------------------------------------------------------

SparseParams SparseParams::from_active(const Architecture& arch,
                                       std::span<const std::pair<std::size_t, double>> active) {
  const std::size_t T = arch.num_params();
  std::vector<std::uint8_t> mask(T, 0);
  std::vector<double> values(T, 0.0);
  for (const auto& [index, value] : active) {
    if (index >= T) throw ConfigError("active index " + std::to_string(index) + " >= T");
    if (mask[index]) throw ConfigError("duplicate active index " + std::to_string(index));
    mask[index] = 1;
    values[index] = value;
  }
  return from_dense(arch, std::move(mask), std::move(values));
}

SparseParams SparseParams::from_dense(const Architecture& arch, std::vector<std::uint8_t> mask,
                                      std::vector<double> values) {
  if (mask.size() != arch.num_params() || values.size() != arch.num_params()) {
    throw ConfigError("mask/value length must equal T=" + std::to_string(arch.num_params()));
  }
  std::vector<std::size_t> active;
  active.reserve(arch.sparsity());
  for (std::size_t t = 0; t < mask.size(); ++t) {
    if (mask[t] > 1) throw ConfigError("mask entries must be 0 or 1");
    if (mask[t]) active.push_back(t);
  }
  SparseParams out(arch, std::move(mask), std::move(values), std::move(active));
  out.validate();
  return out;
}

void SparseParams::validate() const {
  if (active_.size() != arch_.sparsity()) {
    throw ConfigError("mask has " + std::to_string(active_.size()) + " active entries, expected S=" +
                      std::to_string(arch_.sparsity()));
  }
  const double cb = arch_.coef_bound();
  for (std::size_t t = 0; t < values_.size(); ++t) {
    if (!std::isfinite(values_[t])) throw ConfigError("non-finite coefficient");
    if (!mask_[t] && values_[t] != 0.0) {
      throw ConfigError("inactive coefficient " + std::to_string(t) + " is nonzero");
    }
    if (std::abs(values_[t]) > cb) {
      throw ConfigError("coefficient " + std::to_string(t) + " exceeds C_B");
    }
  }
}

SparseParams SparseParams::with_value(std::size_t index, double value) const {
  if (index >= values_.size() || !mask_[index]) throw IndexError("with_value: inactive index");
  if (!std::isfinite(value) || std::abs(value) > arch_.coef_bound()) {
    throw ConfigError("with_value: value outside [-C_B, C_B]");
  }
  SparseParams out = *this;
  out.values_[index] = value;
  return out;
}

SparseParams SparseParams::with_swap(std::size_t from, std::size_t to, double value) const {
  if (from >= mask_.size() || !mask_[from]) throw IndexError("with_swap: source not active");
  if (to >= mask_.size() || mask_[to]) throw IndexError("with_swap: target already active");
  if (!std::isfinite(value) || std::abs(value) > arch_.coef_bound()) {
    throw ConfigError("with_swap: value outside [-C_B, C_B]");
  }
  SparseParams out = *this;
  out.mask_[from] = 0;
  out.values_[from] = 0.0;
  out.mask_[to] = 1;
  out.values_[to] = value;
  auto it = std::lower_bound(out.active_.begin(), out.active_.end(), from);
  out.active_.erase(it);
  out.active_.insert(std::lower_bound(out.active_.begin(), out.active_.end(), to), to);
  return out;
}

// ---------------------------------------------------------------------------

Activation Activation::relu() { return {"relu", &relu_fn}; }
Activation Activation::identity() { return {"identity", &identity_fn}; }

Activation Activation::custom(std::string name, Fn fn) {
  if (fn == nullptr) throw ConfigError("activation function is null");
  if (!satisfies_activation_gate(fn)) {
    throw ConfigError("activation '" + name + "' violates |rho(u)| <= |u|");
  }
  return {std::move(name), fn};
}

bool satisfies_activation_gate(Activation::Fn fn) {
  constexpr int kSteps = 20000;
  for (int k = -kSteps; k <= kSteps; ++k) {
    const double u = 1e3 * static_cast<double>(k) / kSteps;
    const double small = 1e-6 * static_cast<double>(k) / kSteps;
    for (double probe : {u, small}) {
      const double out = fn(probe);
      const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(probe);
      if (!(std::abs(out) <= std::abs(probe) + slack)) return false;
    }
  }
  return true;
}

CompiledNetwork::CompiledNetwork(const SparseParams& params, Activation act)
    : input_dim_(params.arch().input_dim()),
      max_width_(std::max(params.arch().input_dim(), params.arch().width())),
      act_(std::move(act)) {
  const Architecture& arch = params.arch();
  layers_.resize(arch.depth());
  std::size_t layer = 1;
  std::size_t layer_start = 0;
  std::size_t in_dim = arch.layer_width(0);
  std::size_t out_dim = arch.layer_width(1);
  layers_[0].out_dim = out_dim;
  for (std::size_t t : params.active()) {
    while (t >= layer_start + out_dim * (in_dim + 1)) {
      layer_start += out_dim * (in_dim + 1);
      ++layer;
      in_dim = out_dim;
      out_dim = arch.layer_width(layer);
      layers_[layer - 1].out_dim = out_dim;
    }
    const std::size_t r = t - layer_start;
    const double v = params.values()[t];
    if (r < out_dim * in_dim) {
      layers_[layer - 1].edges.push_back(
          {static_cast<std::uint32_t>(r / in_dim), static_cast<std::uint32_t>(r % in_dim), v});
    } else {
      layers_[layer - 1].biases.push_back({static_cast<std::uint32_t>(r - out_dim * in_dim), v});
    }
  }
  for (std::size_t l = layer + 1; l <= arch.depth(); ++l) {
    layers_[l - 1].out_dim = arch.layer_width(l);
  }
}

double CompiledNetwork::operator()(std::span<const double> x) const {
  // Two ping-pong buffers; widths are small so stack-sized reuse per call is
  // cheap relative to the edge loop.
  thread_local std::vector<double> buf_a, buf_b;
  buf_a.assign(x.begin(), x.end());
  if (buf_b.size() < max_width_) buf_b.resize(max_width_);
  std::vector<double>* in = &buf_a;
  std::vector<double>* out = &buf_b;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (out->size() < layer.out_dim) out->resize(layer.out_dim);
    std::fill_n(out->begin(), layer.out_dim, 0.0);
    for (const Edge& e : layer.edges) (*out)[e.row] += e.weight * (*in)[e.col];
    for (const Bias& b : layer.biases) (*out)[b.row] += b.value;
    if (l + 1 < layers_.size()) {
      for (std::size_t i = 0; i < layer.out_dim; ++i) (*out)[i] = act_((*out)[i]);
    }
    std::swap(in, out);
  }
  return (*in)[0];
}

double forward(const SparseParams& params, std::span<const double> x, const Activation& act) {
  if (x.size() != params.arch().input_dim()) {
    throw ConfigError("input has dimension " + std::to_string(x.size()) + ", network expects " +
                      std::to_string(params.arch().input_dim()));
  }
  for (double xi : x) {
    if (!(std::abs(xi) <= 1.0)) throw InputError("input coordinate outside [-1, 1]");
  }
  return CompiledNetwork(params, act)(x);
}

int classify_output(double output) noexcept { return output > 0.0 ? 1 : -1; }

int classify(const SparseParams& params, std::span<const double> x, const Activation& act) {
  return classify_output(forward(params, x, act));
}

double output_magnitude_bound(const Architecture& arch) {
  const double cd = arch.coef_bound() * static_cast<double>(arch.width());
  if (!(cd > 1.0)) throw ConfigError("output_magnitude_bound requires C_B * D > 1");
  const double d = static_cast<double>(arch.input_dim());
  const double L = static_cast<double>(arch.depth());
  const double cb = arch.coef_bound();
  double bias_part = 0.0;
  for (std::size_t u = 1; u <= arch.depth(); ++u) {
    bias_part += std::pow(cd, static_cast<double>(arch.depth() - u)) * cb;
  }
  const double weight_part = std::pow(cd, L - 1.0) * ((cd * (d + 1.0) - d) / (cd - 1.0)) * L * cb;
  const double bound = weight_part + bias_part;
  if (!std::isfinite(bound)) throw NumericalError("output magnitude bound overflows");
  return bound;
}

}  // namespace sparsepac
