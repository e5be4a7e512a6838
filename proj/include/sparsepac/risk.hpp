#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sparsepac/network.hpp"

namespace sparsepac {

// Labelled sample: n rows in [-1,1]^d, labels in {-1,+1}.
class Dataset {
 public:
  // features is row-major, n * dim entries. Throws InputError on a box or
  // label violation, ConfigError on shape problems.
  Dataset(std::size_t dim, std::vector<double> features, std::vector<int> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim_, dim_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const double> features() const noexcept { return features_; }
  std::span<const int> labels() const noexcept { return labels_; }

  // Same rows with every label negated.
  Dataset flipped() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

// f_theta(x_i) for every row, in row order.
std::vector<double> network_outputs(const SparseParams& params, const Dataset& data,
                                    const Activation& act = Activation::relu());

// (1/n) sum (1 - y_i f_i)_+ and (1/n) sum 1{y_i f_i <= 0} from precomputed
// outputs.
double hinge_risk_from_outputs(std::span<const double> outputs, const Dataset& data);
double zero_one_risk_from_outputs(std::span<const double> outputs, const Dataset& data);

// Empirical hinge risk r_n^h(theta).
double hinge_risk(const SparseParams& params, const Dataset& data,
                  const Activation& act = Activation::relu());

// Empirical 0-1 risk with the boundary y f = 0 counted as an error.
double zero_one_risk(const SparseParams& params, const Dataset& data,
                     const Activation& act = Activation::relu());

struct MisclassificationEstimate {
  double rate = 0.0;
  double std_error = 0.0;  // binomial sqrt(p(1-p)/n)
};

// Held-out estimate of P(Y != sign f_theta(x)) using classify's tie-break.
MisclassificationEstimate test_misclassification(const SparseParams& params, const Dataset& test,
                                                 const Activation& act = Activation::relu());

}  // namespace sparsepac
