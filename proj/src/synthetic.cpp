#include "sparsepac/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "sparsepac/errors.hpp"
#include "sparsepac/parallel.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/rng.hpp"

namespace sparsepac {

NoiseModel NoiseModel::flip(double p) {
  if (!(p >= 0.0 && p < 0.5)) throw ConfigError("flip probability must lie in [0, 0.5)");
  return NoiseModel{p};
}

NoiseModel NoiseModel::parse(const std::string& text) {
  if (text == "none" || text == "noiseless") return noiseless();
  const std::string prefix = "flip:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string rest = text.substr(prefix.size());
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(rest, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse noise model '" + text + "'");
    }
    if (used != rest.size()) throw ConfigError("cannot parse noise model '" + text + "'");
    return flip(p);
  }
  throw ConfigError("noise model must be 'none' or 'flip:<p>', got '" + text + "'");
}

std::string NoiseModel::to_string() const {
  if (is_noiseless()) return "none";
  std::ostringstream os;
  os << "flip:" << flip_prob;
  return os.str();
}

void TeacherSpec::validate() const {
  NoiseModel::flip(noise.flip_prob);
  if (!(std::isfinite(margin_tau) && margin_tau >= 0.0)) {
    throw ConfigError("margin filter tau must be finite and >= 0");
  }
}

Dataset gen_dataset(const TeacherSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw ConfigError("sample size must be positive");
  const std::size_t d = spec.params.arch().input_dim();
  const CompiledNetwork teacher(spec.params);
  constexpr std::size_t kMaxAttempts = 10000;

  std::vector<double> features(n * d);
  std::vector<int> labels(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(seed, i);
    std::span<double> x(features.data() + i * d, d);
    double f = 0.0;
    std::size_t attempts = 0;
    do {
      if (attempts++ == kMaxAttempts) {
        throw GenerationError("margin filter starved: no |f*(x)| >= tau in 10^4 draws");
      }
      for (double& v : x) v = rng.uniform(-1.0, 1.0);
      f = teacher(x);
    } while (spec.margin_tau > 0.0 && std::abs(f) < spec.margin_tau);
    int y = classify_output(f);
    if (spec.noise.flip_prob > 0.0 && rng.bernoulli(spec.noise.flip_prob)) y = -y;
    labels[i] = y;
  });
  return Dataset(d, std::move(features), std::move(labels));
}

SparseParams draw_balanced_teacher(const Architecture& arch, std::uint64_t seed, double min_minority,
                                   std::size_t max_attempts) {
  constexpr std::size_t kProbe = 2000;
  const std::size_t d = arch.input_dim();
  std::vector<double> probe(kProbe * d);
  Rng probe_rng(seed, 0xb0a7);
  for (double& v : probe) v = probe_rng.uniform(-1.0, 1.0);

  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(seed, attempt);
    SparseParams candidate = sample_prior(arch, rng);
    const CompiledNetwork net(candidate);
    std::size_t positive = 0;
    bool flat_zero = false;
    for (std::size_t i = 0; i < kProbe && !flat_zero; ++i) {
      const double out = net(std::span<const double>(probe.data() + i * d, d));
      if (out > 0.0) ++positive;
      // exact zeros come from dead-ReLU regions and would make the teacher err
      flat_zero = out == 0.0;
    }
    if (flat_zero) continue;
    const double frac = static_cast<double>(positive) / static_cast<double>(kProbe);
    if (std::min(frac, 1.0 - frac) >= min_minority) return candidate;
  }
  throw GenerationError("no balanced teacher found in " + std::to_string(max_attempts) +
                        " prior draws");
}

SmoothFunction smooth_test_function(const std::string& name, std::size_t d) {
  if (d < 1) throw ConfigError("dimension must be >= 1");
  if (name == "sine") {
    return [](std::span<const double> x) { return std::sin(std::numbers::pi * x[0]); };
  }
  if (name == "radial") {
    return [d](std::span<const double> x) {
      double sq = 0.0;
      for (double v : x) sq += v * v;
      return 0.5 - sq / (2.0 * static_cast<double>(d));
    };
  }
  if (name == "prod") {
    if (d < 2) throw ConfigError("'prod' needs d >= 2");
    return [](std::span<const double> x) { return x[0] * x[1]; };
  }
  throw ConfigError("unknown smooth test function '" + name + "'");
}

}  // namespace sparsepac
