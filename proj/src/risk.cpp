#include "sparsepac/risk.hpp"

#include <cmath>
#include <string>

#include "sparsepac/errors.hpp"

namespace sparsepac {
namespace {

void check_dims(const SparseParams& params, const Dataset& data) {
  if (params.arch().input_dim() != data.dim()) {
    throw ConfigError("network expects d=" + std::to_string(params.arch().input_dim()) +
                      " but data has d=" + std::to_string(data.dim()));
  }
}

void check_outputs(std::span<const double> outputs, const Dataset& data) {
  if (outputs.size() != data.size()) throw ConfigError("output count differs from sample size");
}

}  // namespace

Dataset::Dataset(std::size_t dim, std::vector<double> features, std::vector<int> labels)
    : dim_(dim), features_(std::move(features)), labels_(std::move(labels)) {
  if (dim_ < 1) throw ConfigError("dataset dimension must be >= 1");
  if (labels_.empty()) throw ConfigError("dataset must contain at least one row");
  if (features_.size() != labels_.size() * dim_) {
    throw ConfigError("feature matrix size does not match n * d");
  }
  for (double v : features_) {
    if (!(std::abs(v) <= 1.0)) throw InputError("feature value outside [-1, 1]");
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) throw InputError("label must be -1 or +1");
  }
}

Dataset Dataset::flipped() const {
  std::vector<int> labels(labels_.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = -labels_[i];
  return Dataset(dim_, features_, std::move(labels));
}

std::vector<double> network_outputs(const SparseParams& params, const Dataset& data,
                                    const Activation& act) {
  check_dims(params, data);
  const CompiledNetwork net(params, act);
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) out[i] = net(data.row(i));
  return out;
}

double hinge_risk_from_outputs(std::span<const double> outputs, const Dataset& data) {
  check_outputs(outputs, data);
  double sum = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double slack = 1.0 - data.label(i) * outputs[i];
    if (slack > 0.0) sum += slack;
  }
  return sum / static_cast<double>(data.size());
}

double zero_one_risk_from_outputs(std::span<const double> outputs, const Dataset& data) {
  check_outputs(outputs, data);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (data.label(i) * outputs[i] <= 0.0) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

double hinge_risk(const SparseParams& params, const Dataset& data, const Activation& act) {
  return hinge_risk_from_outputs(network_outputs(params, data, act), data);
}

double zero_one_risk(const SparseParams& params, const Dataset& data, const Activation& act) {
  return zero_one_risk_from_outputs(network_outputs(params, data, act), data);
}

MisclassificationEstimate test_misclassification(const SparseParams& params, const Dataset& test,
                                                 const Activation& act) {
  const auto outputs = network_outputs(params, test, act);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (classify_output(outputs[i]) != test.label(i)) ++wrong;
  }
  const double n = static_cast<double>(test.size());
  const double p = static_cast<double>(wrong) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace sparsepac
