#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "sparsepac/network.hpp"
#include "sparsepac/risk.hpp"

namespace sparsepac {

// Label noise: noiseless when flip_prob == 0, otherwise every label is
// flipped independently with probability flip_prob < 0.5.
struct NoiseModel {
  double flip_prob = 0.0;

  static NoiseModel noiseless() { return {}; }
  static NoiseModel flip(double p);
  bool is_noiseless() const noexcept { return flip_prob == 0.0; }
  // "none" or "flip:<p>".
  static NoiseModel parse(const std::string& text);
  std::string to_string() const;
};

struct TeacherSpec {
  SparseParams params;
  NoiseModel noise{};
  double margin_tau = 0.0;  // resample x until |f*(x)| >= tau; 0 disables

  void validate() const;
  // Misclassification of the teacher's own sign rule: the flip rate.
  double bayes_risk() const noexcept { return noise.flip_prob; }
};

// n points, x uniform on [-1,1]^d, y = sign(f*(x)) (sign(0) = -1) then flipped
// per the noise model. Point i uses its own random stream (seed, i), so the
// generation order does not matter. Throws GenerationError when the margin
// filter rejects 10^4 consecutive candidates for one point.
Dataset gen_dataset(const TeacherSpec& spec, std::size_t n, std::uint64_t seed);

// Draws teacher parameters from the prior until the teacher labels at least
// `min_minority` of a uniform probe sample with each sign and never outputs
// exactly 0 there (at most `max_attempts` prior draws; throws GenerationError
// after that).
SparseParams draw_balanced_teacher(const Architecture& arch, std::uint64_t seed,
                                   double min_minority = 0.2, std::size_t max_attempts = 10000);

using SmoothFunction = std::function<double(std::span<const double>)>;

// Analytic stand-ins on [-1,1]^d: "sine" sin(pi x1), "radial"
// 1/2 - |x|^2 / (2d), "prod" x1 x2 (d >= 2). Throws ConfigError otherwise.
SmoothFunction smooth_test_function(const std::string& name, std::size_t d);

}  // namespace sparsepac
