#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "sparsepac/errors.hpp"
#include "sparsepac/network.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/rng.hpp"

using namespace sparsepac;

namespace {

SparseParams chain_net(double a1, double a2, double a3) {
  // d = D = 1, L = 3; layout a1 b1 a2 b2 a3 b3, all six active
  const Architecture arch(1, 3, 1, 6);
  const std::vector<std::pair<std::size_t, double>> e{{0, a1}, {1, 0.0}, {2, a2}, {3, 0.0}, {4, a3}, {5, 0.0}};
  return SparseParams::from_active(arch, e);
}

double identity_fn(double u) { return u; }
double doubling(double u) { return 2.0 * u; }
double tanh_fn(double u) { return std::tanh(u); }

}  // namespace

TEST(CountParams, HandCountedShapes) {
  EXPECT_EQ(count_params(2, 3, 3), 3u * 3 + 3 * 4 + 1 * 4);
  EXPECT_EQ(count_params(1, 3, 1), 6u);
  EXPECT_EQ(count_params(4, 4, 4), 20u + 20 + 20 + 5);
}

TEST(CountParams, RejectsInvalidShapes) {
  EXPECT_THROW(count_params(0, 3, 3), ConfigError);
  EXPECT_THROW(count_params(2, 2, 3), ConfigError);
  EXPECT_THROW(count_params(2, 3, 0), ConfigError);
  EXPECT_THROW(count_params(1, 3, std::size_t{1} << 40), ConfigError);
}

TEST(Architecture, ValidatesSparsityAndBound) {
  EXPECT_THROW(Architecture(2, 3, 3, 0), ConfigError);
  EXPECT_THROW(Architecture(2, 3, 3, 26), ConfigError);
  EXPECT_THROW(Architecture(2, 3, 3, 5, 1.5), ConfigError);
  const Architecture a(2, 3, 3, 25);
  EXPECT_EQ(a.num_params(), 25u);
  EXPECT_EQ(a.layer_offset(1), 0u);
  EXPECT_EQ(a.layer_offset(2), 9u);
  EXPECT_EQ(a.layer_offset(3), 21u);
  EXPECT_EQ(a.layer_offset(4), 25u);
}

TEST(Layout, FirstCoordinates) {
  const Architecture a(1, 3, 1, 1);
  EXPECT_EQ(index_to_coord(a, 0), (CoordAddress{1, CoordKind::matrix, 0, 0}));
  EXPECT_EQ(index_to_coord(a, 1), (CoordAddress{1, CoordKind::bias, 0, std::nullopt}));
  EXPECT_EQ(index_to_coord(a, 5), (CoordAddress{3, CoordKind::bias, 0, std::nullopt}));
  EXPECT_THROW(index_to_coord(a, 6), IndexError);
}

TEST(Layout, RoundTripsEveryIndex) {
  for (const auto& [d, L, D] : std::vector<std::array<std::size_t, 3>>{{2, 3, 3}, {4, 4, 4}, {3, 5, 2}}) {
    const Architecture a(d, L, D, 1);
    for (std::size_t t = 0; t < a.num_params(); ++t) {
      EXPECT_EQ(coord_to_index(a, index_to_coord(a, t)), t);
    }
  }
  const Architecture a(2, 3, 3, 1);
  // row-major matrix of layer 2 starts at 9; entry (1, 2) is 9 + 1*3 + 2
  EXPECT_EQ(coord_to_index(a, {2, CoordKind::matrix, 1, 2}), 14u);
  EXPECT_EQ(coord_to_index(a, {2, CoordKind::bias, 2, std::nullopt}), 20u);
  EXPECT_THROW(coord_to_index(a, {2, CoordKind::matrix, 3, 0}), IndexError);
}

TEST(SparseParams, EnforcesExactSupport) {
  const Architecture a(1, 3, 1, 2);
  const std::vector<std::pair<std::size_t, double>> ok{{0, 1.0}, {4, -2.0}};
  const SparseParams p = SparseParams::from_active(a, ok);
  EXPECT_EQ(p.active().size(), 2u);
  EXPECT_TRUE(p.is_active(4));
  EXPECT_FALSE(p.is_active(1));
  EXPECT_EQ(p.value(1), 0.0);

  const std::vector<std::pair<std::size_t, double>> too_few{{0, 1.0}};
  const std::vector<std::pair<std::size_t, double>> dup{{0, 1.0}, {0, 1.0}};
  const std::vector<std::pair<std::size_t, double>> big{{0, 2.5}, {1, 0.0}};
  const std::vector<std::pair<std::size_t, double>> far{{0, 1.0}, {6, 0.0}};
  EXPECT_THROW(SparseParams::from_active(a, too_few), ConfigError);
  EXPECT_THROW(SparseParams::from_active(a, dup), ConfigError);
  EXPECT_THROW(SparseParams::from_active(a, big), ConfigError);
  EXPECT_THROW(SparseParams::from_active(a, far), ConfigError);
  EXPECT_THROW(SparseParams::from_dense(a, {1, 0, 0, 0, 1, 0}, {1, 0.5, 0, 0, 1, 0}), ConfigError);
}

TEST(SparseParams, CopyHelpersPreservePopcount) {
  const Architecture a(1, 3, 1, 2);
  const std::vector<std::pair<std::size_t, double>> e{{0, 1.0}, {4, -2.0}};
  const SparseParams p = SparseParams::from_active(a, e);
  const SparseParams q = p.with_swap(0, 3, 0.5);
  EXPECT_FALSE(q.is_active(0));
  EXPECT_EQ(q.value(0), 0.0);
  EXPECT_EQ(q.value(3), 0.5);
  EXPECT_EQ(q.active().size(), 2u);
  EXPECT_EQ(q.with_swap(3, 0, 1.0), p);
  EXPECT_EQ(p.with_value(4, 1.5).value(4), 1.5);
  EXPECT_THROW(p.with_value(1, 1.0), IndexError);
  EXPECT_THROW(p.with_swap(0, 4, 1.0), IndexError);
}

TEST(Forward, ZeroNetworkIsZero) {
  const Architecture a(2, 3, 3, 3);
  const std::vector<std::pair<std::size_t, double>> e{{0, 0.0}, {10, 0.0}, {24, 0.0}};
  const SparseParams p = SparseParams::from_active(a, e);
  for (double x : {-1.0, 0.0, 0.7}) EXPECT_EQ(forward(p, std::vector<double>{x, -x}), 0.0);
}

TEST(Forward, HandEvaluatedChain) {
  const SparseParams p = chain_net(2.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(forward(p, std::vector<double>{0.5}), 1.0);
  EXPECT_DOUBLE_EQ(forward(p, std::vector<double>{-0.5}), 0.0);
}

TEST(Forward, IdentityChainIsAffineComposition) {
  Rng rng(11);
  const Architecture a(1, 5, 1, 10);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::pair<std::size_t, double>> e;
    std::vector<double> w(10);
    for (std::size_t t = 0; t < 10; ++t) {
      w[t] = rng.uniform(-2.0, 2.0);
      e.emplace_back(t, w[t]);
    }
    const SparseParams p = SparseParams::from_active(a, e);
    const double x = rng.uniform(-1.0, 1.0);
    double expect = x;
    for (std::size_t l = 0; l < 5; ++l) expect = w[2 * l] * expect + w[2 * l + 1];
    EXPECT_NEAR(forward(p, std::vector<double>{x}, Activation::identity()), expect, 1e-12);
  }
}

TEST(Forward, ValidatesInputs) {
  const SparseParams p = chain_net(1.0, 1.0, 1.0);
  EXPECT_THROW(forward(p, std::vector<double>{1.5}), InputError);
  EXPECT_THROW(forward(p, std::vector<double>{0.1, 0.2}), ConfigError);
  EXPECT_THROW(forward(p, std::vector<double>{std::nan("")}), InputError);
}

TEST(Classify, TieBreakIsNegative) {
  EXPECT_EQ(classify_output(0.3), 1);
  EXPECT_EQ(classify_output(0.0), -1);
  EXPECT_EQ(classify_output(-2.0), -1);
  EXPECT_EQ(classify(chain_net(2.0, 1.0, 1.0), std::vector<double>{-0.5}), -1);
  EXPECT_EQ(classify(chain_net(2.0, 1.0, 1.0), std::vector<double>{0.5}), 1);
}

TEST(Activation, GateAdmitsOnlyContractions) {
  EXPECT_TRUE(satisfies_activation_gate(identity_fn));
  EXPECT_TRUE(satisfies_activation_gate(tanh_fn));
  EXPECT_FALSE(satisfies_activation_gate(doubling));
  EXPECT_THROW(Activation::custom("double", doubling), ConfigError);
  const Activation th = Activation::custom("tanh", tanh_fn);
  EXPECT_EQ(th.name(), "tanh");
  const Activation relu = Activation::relu();
  for (double u = -5.0; u <= 5.0; u += 0.25) {
    EXPECT_LE(std::abs(relu(u)), std::abs(u));
    EXPECT_EQ(Activation::identity()(u), u);
  }
}

TEST(OutputBound, HandComputedValue) {
  // 4 * (3/1) * 3 * 2 + (4 + 2 + 1) * 2
  EXPECT_DOUBLE_EQ(output_magnitude_bound(Architecture(1, 3, 1, 1)), 86.0);
  EXPECT_DOUBLE_EQ(output_magnitude_bound(Architecture(1, 3, 1, 1).with_sparsity(6)), 86.0);
}

TEST(OutputBound, DominatesRandomNetworks) {
  Rng rng(7);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d = 1 + rng.index(3);
    const std::size_t L = 3 + rng.index(2);
    const std::size_t D = 1 + rng.index(4);
    const Architecture a(d, L, D, 1 + rng.index(count_params(d, L, D)));
    const SparseParams p = sample_prior(a, rng);
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    EXPECT_LE(std::abs(forward(p, x)), output_magnitude_bound(a));
  }
}

TEST(CompiledNetwork, MatchesForward) {
  Rng rng(3);
  const Architecture a(3, 4, 3, 12);
  for (int rep = 0; rep < 100; ++rep) {
    const SparseParams p = sample_prior(a, rng);
    const CompiledNetwork net(p);
    std::vector<double> x(3);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    EXPECT_EQ(net(x), forward(p, x));
  }
}
