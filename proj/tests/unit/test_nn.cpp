#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "nodedup/errors.hpp"
#include "nodedup/grad_check.hpp"
#include "nodedup/nn.hpp"
#include "nodedup/params.hpp"
#include "testutil.hpp"

namespace nodedup {
namespace {

using testutil::bitwise_equal;
using testutil::random_graph;
using testutil::random_matrix;

// Numeric gradient of a scalar function of one matrix.
DenseMatrix numeric_grad(const std::function<double(const DenseMatrix&)>& f, DenseMatrix x,
                         double eps = 1e-6) {
  DenseMatrix g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = x.data()[i];
    x.data()[i] = orig + eps;
    const double up = f(x);
    x.data()[i] = orig - eps;
    const double down = f(x);
    x.data()[i] = orig;
    g.data()[i] = (up - down) / (2 * eps);
  }
  return g;
}

double max_rel(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    worst = std::max(worst, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-8}));
  }
  return worst;
}

TEST(Ops, Sigmoid) {
  EXPECT_EQ(nn::sigmoid(0.0), 0.5);
  EXPECT_NEAR(nn::sigmoid(2.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_GE(nn::sigmoid(-800.0), 0.0);
  EXPECT_EQ(nn::sigmoid(800.0), 1.0);
}

TEST(Ops, ReluBackwardMasksNegatives) {
  DenseMatrix x(1, 3);
  x << -1.0, 0.0, 2.0;
  DenseMatrix d = DenseMatrix::Ones(1, 3);
  DenseMatrix g = nn::relu_backward(x, d);
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(0, 2), 1.0);
  DenseMatrix y = nn::relu(x);
  EXPECT_EQ(y(0, 0), 0.0);
  EXPECT_EQ(y(0, 2), 2.0);
}

TEST(Ops, TransposeOfProduct) {
  DenseMatrix a = random_matrix(3, 4, 1);
  DenseMatrix b = random_matrix(4, 2, 2);
  DenseMatrix ab_t = nn::matmul(a, b).transpose();
  DenseMatrix bt_at = nn::matmul(DenseMatrix(b.transpose()), DenseMatrix(a.transpose()));
  EXPECT_TRUE(bitwise_equal(ab_t, bt_at));
}

TEST(Ops, MatmulVariantsAgree) {
  DenseMatrix a = random_matrix(5, 3, 3);
  DenseMatrix b = random_matrix(5, 4, 4);
  DenseMatrix c = random_matrix(6, 3, 5);
  EXPECT_LT(max_rel(nn::matmul_tn(a, b), DenseMatrix(a.transpose() * b)), 1e-13);
  EXPECT_LT(max_rel(nn::matmul_nt(a, c), DenseMatrix(a * c.transpose())), 1e-13);
  EXPECT_THROW(nn::matmul(a, b), std::invalid_argument);
}

TEST(Ops, MatmulRowsIndependentOfOtherRows) {
  DenseMatrix a = random_matrix(7, 9, 6);
  DenseMatrix w = random_matrix(9, 5, 7);
  DenseMatrix full = nn::matmul(a, w);
  DenseMatrix one = nn::matmul(DenseMatrix(a.row(3)), w);
  for (Eigen::Index c = 0; c < 5; ++c) EXPECT_EQ(full(3, c), one(0, c));
}

TEST(Ops, MatmulBackwardMatchesFiniteDifferences) {
  DenseMatrix a = random_matrix(4, 3, 8);
  DenseMatrix b = random_matrix(3, 2, 9);
  DenseMatrix w = random_matrix(4, 2, 10);
  auto loss_a = [&](const DenseMatrix& x) { return nn::matmul(x, b).cwiseProduct(w).sum(); };
  auto loss_b = [&](const DenseMatrix& x) { return nn::matmul(a, x).cwiseProduct(w).sum(); };
  DenseMatrix da, db;
  nn::matmul_backward(a, b, w, &da, &db);
  EXPECT_LT(max_rel(da, numeric_grad(loss_a, a)), 1e-7);
  EXPECT_LT(max_rel(db, numeric_grad(loss_b, b)), 1e-7);
}

TEST(Ops, AddRowBackwardIsColumnSum) {
  DenseMatrix d = random_matrix(4, 3, 11);
  DenseMatrix g = nn::add_row_backward(d);
  ASSERT_EQ(g.rows(), 1);
  for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(g(0, c), d.col(c).sum(), 1e-14);
}

TEST(MeanAggregate, TwoNeighborsAndIsolated) {
  std::vector<Edge> edges{{0, 1}, {0, 2}};
  auto adj = Adjacency::from_edges(4, edges, false);
  DenseMatrix h = random_matrix(4, 3, 12);
  DenseMatrix m = nn::mean_aggregate(adj, h);
  for (Eigen::Index c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(m(0, c), (h(1, c) + h(2, c)) / 2);
    EXPECT_EQ(m(3, c), 0.0);
    EXPECT_EQ(m(1, c), h(0, c));
  }
}

TEST(MeanAggregate, SelfLoopContributesOwnRow) {
  std::vector<Edge> edges{{0, 0}};
  auto adj = Adjacency::from_edges(2, edges, true);
  DenseMatrix h = random_matrix(2, 3, 13);
  DenseMatrix m = nn::mean_aggregate(adj, h);
  for (Eigen::Index c = 0; c < 3; ++c) EXPECT_EQ(m(0, c), h(0, c));
}

TEST(MeanAggregate, BackwardMatchesFiniteDifferences) {
  Graph g = random_graph(6, 8, 3, 14);
  DenseMatrix h = random_matrix(6, 3, 15);
  DenseMatrix w = random_matrix(6, 3, 16);
  auto f = [&](const DenseMatrix& x) { return nn::mean_aggregate(g.adjacency(), x).cwiseProduct(w).sum(); };
  DenseMatrix analytic = nn::mean_aggregate_backward(g.adjacency(), w);
  EXPECT_LT(max_rel(analytic, numeric_grad(f, h)), 1e-6);

  auto sum_f = [&](const DenseMatrix& x) { return nn::mean_aggregate(g.adjacency(), x).sum(); };
  DenseMatrix ones = DenseMatrix::Ones(6, 3);
  EXPECT_LT(max_rel(nn::mean_aggregate_backward(g.adjacency(), ones), numeric_grad(sum_f, h)), 1e-6);
}

TEST(GcnPropagate, SingleNodeAndBackward) {
  auto lone = Adjacency::from_edges(1, {}, false);
  DenseMatrix h = random_matrix(1, 4, 17);
  EXPECT_TRUE(bitwise_equal(nn::gcn_propagate(lone, h), h));

  Graph g = random_graph(6, 7, 3, 18);
  DenseMatrix x = random_matrix(6, 3, 19);
  DenseMatrix w = random_matrix(6, 3, 20);
  auto f = [&](const DenseMatrix& y) { return nn::gcn_propagate(g.adjacency(), y).cwiseProduct(w).sum(); };
  EXPECT_LT(max_rel(nn::gcn_propagate_backward(g.adjacency(), w), numeric_grad(f, x)), 1e-6);
}

TEST(Dropout, IdentityAndInvertedScaling) {
  DenseMatrix x = random_matrix(50, 40, 21);
  EXPECT_TRUE(bitwise_equal(nn::DropoutMask::identity().apply(x), x));

  auto mask = nn::DropoutMask::sample(50, 40, 0.5, 3, 1);
  DenseMatrix y = mask.apply(x);
  std::size_t kept = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (y.data()[i] != 0.0) {
      ++kept;
      EXPECT_EQ(y.data()[i], x.data()[i] * 2.0);
    }
  }
  EXPECT_GT(kept, 800u);
  EXPECT_LT(kept, 1200u);
  auto again = nn::DropoutMask::sample(50, 40, 0.5, 3, 1);
  EXPECT_TRUE(bitwise_equal(again.mask(), mask.mask()));
  auto other = nn::DropoutMask::sample(50, 40, 0.5, 3, 2);
  EXPECT_FALSE(bitwise_equal(other.mask(), mask.mask()));
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  ParamStore store;
  store.add("w", random_matrix(3, 3, 22));
  DenseMatrix before = store.at("w").value;
  for (int i = 0; i < 10; ++i) adam_step(store, {});
  EXPECT_TRUE(bitwise_equal(store.at("w").value, before));
  EXPECT_EQ(store.step(), 10u);
}

TEST(Adam, FirstStepMagnitudeIsLearningRate) {
  ParamStore store;
  store.add("w", DenseMatrix::Constant(2, 2, 0.5));
  store.at("w").grad.setOnes();
  adam_step(store, {.lr = 0.001});
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(store.at("w").value.data()[i], 0.5 - 0.001, 1e-10);
  }
  EXPECT_EQ(store.at("w").grad.norm(), 0.0);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    ParamStore store;
    store.add("w", random_matrix(4, 2, 23));
    for (int i = 0; i < 5; ++i) {
      store.at("w").grad = random_matrix(4, 2, 100 + static_cast<std::uint64_t>(i));
      adam_step(store, {.lr = 0.01});
    }
    return store.at("w").value;
  };
  EXPECT_TRUE(bitwise_equal(run(), run()));
}

TEST(Params, DuplicateNameRejected) {
  ParamStore store;
  store.add("a", DenseMatrix::Zero(1, 1));
  EXPECT_THROW(store.add("a", DenseMatrix::Zero(1, 1)), std::invalid_argument);
  EXPECT_EQ(store.num_scalars(), 1u);
}

TEST(Params, GlorotBounds) {
  Rng rng(1);
  DenseMatrix w = glorot_uniform(30, 20, rng);
  const double a = std::sqrt(6.0 / 50.0);
  EXPECT_LE(w.maxCoeff(), a);
  EXPECT_GE(w.minCoeff(), -a);
  EXPECT_GT(w.maxCoeff(), 0.8 * a);
}

// f(w) = 0.5 * ||A w - b||^2
class Quadratic : public Objective {
 public:
  Quadratic() : a_(random_matrix(6, 4, 24)), b_(random_matrix(6, 1, 25)) {
    store_.add("w", random_matrix(4, 1, 26));
  }
  ParamStore& params() override { return store_; }
  double evaluate(bool with_grad) override {
    DenseMatrix r = a_ * store_.at("w").value - b_;
    if (with_grad) store_.at("w").grad = a_.transpose() * r;
    return 0.5 * r.squaredNorm();
  }

 private:
  DenseMatrix a_, b_;
  ParamStore store_;
};

class Noisy : public Quadratic {
 public:
  bool is_stochastic() const override { return true; }
};

TEST(GradCheck, QuadraticIsExact) {
  Quadratic q;
  DenseMatrix before = q.params().at("w").value;
  auto r = grad_check(q);
  EXPECT_LT(r.max_rel_error, 1e-9);
  EXPECT_EQ(r.coords_checked, 4u);
  EXPECT_TRUE(bitwise_equal(q.params().at("w").value, before));
}

TEST(GradCheck, RefusesStochasticObjective) {
  Noisy n;
  EXPECT_THROW(grad_check(n), std::logic_error);
}

}  // namespace
}  // namespace nodedup
