#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nodedup/errors.hpp"
#include "nodedup/loss.hpp"
#include "testutil.hpp"

namespace nodedup {
namespace {

using testutil::random_matrix;

TEST(Bce, HalfProbabilityGivesLn2) {
  std::vector<double> logits(6, 0.0);
  std::vector<double> labels{1, 0, 1, 0, 1, 0};
  auto r = bce_with_logits(logits, labels);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(r.grad[i], (0.5 - labels[i]) / 6.0, 1e-16);
}

TEST(Bce, DecreasesTowardPerfectPredictions) {
  std::vector<double> labels{1, 0, 1};
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 0.0; s <= 40.0; s += 2.0) {
    std::vector<double> logits{s, -s, s};
    const double loss = bce_with_logits(logits, labels).loss;
    EXPECT_LT(loss, prev);
    prev = loss;
  }
  EXPECT_LT(prev, 1e-16);
}

TEST(Bce, StableForLargeLogits) {
  std::vector<double> logits{800.0, -800.0};
  std::vector<double> labels{0.0, 1.0};
  auto r = bce_with_logits(logits, labels);
  EXPECT_NEAR(r.loss, 800.0, 1e-9);
}

TEST(Bce, GradientMatchesFiniteDifferences) {
  Rng rng(3);
  std::vector<double> logits(20), labels(20);
  for (std::size_t i = 0; i < 20; ++i) {
    logits[i] = 4.0 * standard_normal(rng);
    labels[i] = static_cast<double>(uniform_index(rng, 2));
  }
  auto r = bce_with_logits(logits, labels);
  const double eps = 1e-5;
  for (std::size_t i = 0; i < 20; ++i) {
    auto up = logits, down = logits;
    up[i] += eps;
    down[i] -= eps;
    const double numeric =
        (bce_with_logits(up, labels).loss - bce_with_logits(down, labels).loss) / (2 * eps);
    EXPECT_NEAR(numeric, r.grad[i], 1e-10) << "logit " << logits[i];
  }
}

TEST(Bce, Errors) {
  std::vector<double> one{0.0}, two{0.0, 1.0}, none;
  EXPECT_THROW(bce_with_logits(one, two), std::invalid_argument);
  EXPECT_THROW(bce_with_logits(none, none), std::invalid_argument);
  std::vector<double> bad{std::nan("")};
  EXPECT_THROW(bce_with_logits(bad, one), DivergenceError);
}

DenseMatrix normalized(DenseMatrix m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) m.row(r).normalize();
  return m;
}

// Pulling the student toward the teacher lowers both losses together.
TEST(Distillation, BothLossesFallAsStudentApproachesTeacher) {
  DenseMatrix teacher = normalized(random_matrix(12, 5, 4));
  DenseMatrix start = normalized(teacher + 0.3 * random_matrix(12, 5, 5));
  auto first = distillation_losses(start, teacher);
  ASSERT_TRUE(std::isfinite(first.sp));
  double kd = first.kd, sp = first.sp;
  for (double t = 0.1; t <= 1.0; t += 0.1) {
    DenseMatrix s = normalized((1 - t) * start + t * teacher);
    auto l = distillation_losses(s, teacher);
    EXPECT_LE(l.kd, kd + 1e-15);
    EXPECT_LE(l.sp, sp + 1e-15);
    EXPECT_LE(l.kd, l.sp + 1e-15);
    kd = l.kd;
    sp = l.sp;
  }
  EXPECT_NEAR(kd, -1.0, 1e-12);
  EXPECT_NEAR(sp, 0.0, 1e-12);
}

TEST(Distillation, NegativeCosineMakesSpInfinite) {
  DenseMatrix t = normalized(random_matrix(3, 4, 6));
  DenseMatrix s = -t;
  auto l = distillation_losses(s, t);
  EXPECT_TRUE(std::isinf(l.sp));
  EXPECT_NEAR(l.kd, 1.0, 1e-12);
  EXPECT_THROW(distillation_losses(DenseMatrix(2, 3), DenseMatrix(3, 3)), std::invalid_argument);
}

}  // namespace
}  // namespace nodedup
