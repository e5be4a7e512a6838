#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sparsepac/errors.hpp"
#include "sparsepac/network.hpp"
#include "sparsepac/risk.hpp"
#include "sparsepac/synthetic.hpp"

using namespace sparsepac;

TEST(NoiseModel, Parse) {
  EXPECT_TRUE(NoiseModel::parse("none").is_noiseless());
  EXPECT_DOUBLE_EQ(NoiseModel::parse("flip:0.1").flip_prob, 0.1);
  EXPECT_EQ(NoiseModel::parse("flip:0.25").to_string(), "flip:0.25");
  EXPECT_THROW(NoiseModel::parse("flip:0.5"), ConfigError);
  EXPECT_THROW(NoiseModel::parse("gauss"), ConfigError);
  EXPECT_THROW(NoiseModel::flip(-0.1), ConfigError);
}

TEST(Teacher, BalancedAndNonzero) {
  const Architecture a(2, 3, 3, 6);
  const SparseParams t = draw_balanced_teacher(a, 3);
  EXPECT_EQ(t, draw_balanced_teacher(a, 3));
  const Dataset d = gen_dataset(TeacherSpec{t}, 2000, 1);
  int pos = 0;
  for (std::size_t i = 0; i < d.size(); ++i) pos += d.label(i) > 0;
  EXPECT_GT(pos, 300);
  EXPECT_LT(pos, 1700);
  for (std::size_t i = 0; i < d.size(); ++i) ASSERT_NE(forward(t, d.row(i)), 0.0);
}

TEST(GenDataset, NoiselessTeacherHasZeroRisk) {
  const Architecture a(2, 3, 3, 6);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SparseParams t = draw_balanced_teacher(a, s);
    const Dataset d = gen_dataset(TeacherSpec{t}, 1000, s + 100);
    EXPECT_EQ(zero_one_risk(t, d), 0.0);
    EXPECT_EQ(test_misclassification(t, d).rate, 0.0);
  }
}

TEST(GenDataset, FlipRate) {
  const Architecture a(2, 3, 3, 6);
  const SparseParams t = draw_balanced_teacher(a, 7);
  for (double p : {0.05, 0.2, 0.4}) {
    const TeacherSpec spec{t, NoiseModel::flip(p)};
    EXPECT_DOUBLE_EQ(spec.bayes_risk(), p);
    constexpr std::size_t kN = 20000;
    const double err = test_misclassification(t, gen_dataset(spec, kN, 9)).rate;
    EXPECT_NEAR(err, p, 3.0 * std::sqrt(p * (1 - p) / kN));
  }
}

TEST(GenDataset, FlipKeepsInputs) {
  const SparseParams t = draw_balanced_teacher(Architecture(2, 3, 3, 6), 1);
  const Dataset clean = gen_dataset(TeacherSpec{t}, 500, 4);
  const Dataset noisy = gen_dataset(TeacherSpec{t, NoiseModel::flip(0.3)}, 500, 4);
  EXPECT_TRUE(std::equal(clean.features().begin(), clean.features().end(), noisy.features().begin()));
}

TEST(GenDataset, MarginFilter) {
  const SparseParams t = draw_balanced_teacher(Architecture(2, 3, 3, 6), 2);
  const TeacherSpec spec{t, NoiseModel::noiseless(), 0.3};
  const Dataset d = gen_dataset(spec, 500, 5);
  for (std::size_t i = 0; i < d.size(); ++i) ASSERT_GE(std::abs(forward(t, d.row(i))), 0.3);

  // Output bias 1.5 alone: |f| = 1.5 everywhere, so a margin of 1 leaves zero hinge.
  const std::vector<std::pair<std::size_t, double>> e{{24, 1.5}};
  const SparseParams flat = SparseParams::from_active(Architecture(2, 3, 3, 1), e);
  const Dataset m = gen_dataset(TeacherSpec{flat, NoiseModel::noiseless(), 1.0}, 200, 6);
  EXPECT_EQ(hinge_risk(flat, m), 0.0);
  EXPECT_THROW(gen_dataset(TeacherSpec{flat, NoiseModel::noiseless(), 5.0}, 10, 6), GenerationError);
}

TEST(GenDataset, PointStreamsAreIndependentOfN) {
  const SparseParams t = draw_balanced_teacher(Architecture(2, 3, 3, 6), 8);
  const Dataset small = gen_dataset(TeacherSpec{t, NoiseModel::flip(0.1)}, 50, 3);
  const Dataset big = gen_dataset(TeacherSpec{t, NoiseModel::flip(0.1)}, 100, 3);
  EXPECT_TRUE(std::equal(small.features().begin(), small.features().end(), big.features().begin()));
  EXPECT_TRUE(std::equal(small.labels().begin(), small.labels().end(), big.labels().begin()));
  EXPECT_EQ(big, gen_dataset(TeacherSpec{t, NoiseModel::flip(0.1)}, 100, 3));
}

TEST(SmoothFunctions, Values) {
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const std::vector<double> corner{1.0, -1.0, 0.5};
  EXPECT_EQ(smooth_test_function("sine", 3)(zero), 0.0);
  EXPECT_NEAR(smooth_test_function("sine", 3)(std::vector<double>{0.5, 0.0, 0.0}), 1.0, 1e-15);
  EXPECT_EQ(smooth_test_function("radial", 3)(zero), 0.5);
  EXPECT_NEAR(smooth_test_function("radial", 3)(corner), 0.5 - 2.25 / 6.0, 1e-15);
  EXPECT_EQ(smooth_test_function("prod", 3)(corner), -1.0);
  EXPECT_THROW(smooth_test_function("prod", 1), ConfigError);
  EXPECT_THROW(smooth_test_function("cubic", 2), ConfigError);
}
