#include "nodedup/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "nodedup/random.hpp"

namespace nodedup::nn {
namespace {

std::string shape(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape(a) + " vs " +
                                shape(b));
  }
}

void require_rows(const Adjacency& adj, const DenseMatrix& h, const char* op) {
  if (static_cast<std::size_t>(h.rows()) != adj.num_nodes()) {
    throw std::invalid_argument(std::string(op) + ": matrix has " + std::to_string(h.rows()) +
                                " rows for " + std::to_string(adj.num_nodes()) + " nodes");
  }
}

// out(i, :) = sum_k a(i, k) * b(k, :), k ascending. Zero multipliers are
// skipped, which leaves finite results bit-identical.
void gemm_nn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  const Eigen::Index m = a.rows();
  const Eigen::Index kk = a.cols();
  const Eigen::Index n = b.cols();
  out.setZero(m, n);
  const double* __restrict bd = b.data();
  for (Eigen::Index i = 0; i < m; ++i) {
    double* __restrict o = out.data() + i * n;
    const double* ar = a.data() + i * kk;
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double s = ar[k];
      if (s == 0.0) continue;
      const double* __restrict br = bd + k * n;
      for (Eigen::Index j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
}

// out(k, :) = sum_i a(i, k) * b(i, :), i ascending.
void gemm_tn(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& out) {
  const Eigen::Index m = a.rows();
  const Eigen::Index kk = a.cols();
  const Eigen::Index n = b.cols();
  out.setZero(kk, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double* ar = a.data() + i * kk;
    const double* __restrict br = b.data() + i * n;
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double s = ar[k];
      if (s == 0.0) continue;
      double* __restrict o = out.data() + k * n;
      for (Eigen::Index j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: shape mismatch " + shape(a) + " * " + shape(b));
  }
  DenseMatrix out;
  gemm_nn(a, b, out);
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("matmul_tn: shape mismatch " + shape(a) + "^T * " + shape(b));
  }
  DenseMatrix out;
  gemm_tn(a, b, out);
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("matmul_nt: shape mismatch " + shape(a) + " * " + shape(b) + "^T");
  }
  DenseMatrix bt = b.transpose();
  DenseMatrix out;
  gemm_nn(a, bt, out);
  return out;
}

void matmul_backward(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d_out,
                     DenseMatrix* d_a, DenseMatrix* d_b) {
  if (d_out.rows() != a.rows() || d_out.cols() != b.cols()) {
    throw std::invalid_argument("matmul_backward: gradient shape " + shape(d_out) +
                                " does not match " + shape(a) + " * " + shape(b));
  }
  if (d_a != nullptr) *d_a = matmul_nt(d_out, b);
  if (d_b != nullptr) *d_b = matmul_tn(a, d_out);
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  return a + b;
}

DenseMatrix add_row(const DenseMatrix& a, const DenseMatrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw std::invalid_argument("add_row: cannot broadcast " + shape(row) + " over " + shape(a));
  }
  DenseMatrix out = a;
  out.rowwise() += row.row(0);
  return out;
}

DenseMatrix add_row_backward(const DenseMatrix& d_out) { return d_out.colwise().sum(); }

DenseMatrix relu(const DenseMatrix& x) { return x.cwiseMax(0.0); }

DenseMatrix relu_backward(const DenseMatrix& x, const DenseMatrix& d_out) {
  require_same_shape(x, d_out, "relu_backward");
  return (x.array() > 0.0).select(d_out, 0.0);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

DenseMatrix sigmoid(const DenseMatrix& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

DenseMatrix sigmoid_backward(const DenseMatrix& y, const DenseMatrix& d_out) {
  require_same_shape(y, d_out, "sigmoid_backward");
  return (d_out.array() * y.array() * (1.0 - y.array())).matrix();
}

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

DenseMatrix mean_aggregate(const Adjacency& adj, const DenseMatrix& h) {
  require_rows(adj, h, "mean_aggregate");
  DenseMatrix out = DenseMatrix::Zero(h.rows(), h.cols());
  for (std::size_t v = 0; v < adj.num_nodes(); ++v) {
    auto nb = adj.neighbors(static_cast<NodeId>(v));
    if (nb.empty()) continue;
    auto row = out.row(static_cast<Eigen::Index>(v));
    for (NodeId u : nb) row += h.row(u);
    row /= static_cast<double>(nb.size());
  }
  return out;
}

DenseMatrix mean_aggregate_backward(const Adjacency& adj, const DenseMatrix& d_out) {
  require_rows(adj, d_out, "mean_aggregate_backward");
  DenseMatrix d_h = DenseMatrix::Zero(d_out.rows(), d_out.cols());
  for (std::size_t v = 0; v < adj.num_nodes(); ++v) {
    auto nb = adj.neighbors(static_cast<NodeId>(v));
    if (nb.empty()) continue;
    const double w = 1.0 / static_cast<double>(nb.size());
    for (NodeId u : nb) d_h.row(u) += w * d_out.row(static_cast<Eigen::Index>(v));
  }
  return d_h;
}

DenseMatrix gcn_propagate(const Adjacency& adj, const DenseMatrix& h) {
  require_rows(adj, h, "gcn_propagate");
  const std::size_t n = adj.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (std::size_t v = 0; v < n; ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(adj.degree(static_cast<NodeId>(v)) + 1));
  }
  DenseMatrix out(h.rows(), h.cols());
  for (std::size_t v = 0; v < n; ++v) {
    auto row = out.row(static_cast<Eigen::Index>(v));
    row = (inv_sqrt[v] * inv_sqrt[v]) * h.row(static_cast<Eigen::Index>(v));
    for (NodeId u : adj.neighbors(static_cast<NodeId>(v))) {
      row += (inv_sqrt[v] * inv_sqrt[static_cast<std::size_t>(u)]) * h.row(u);
    }
  }
  return out;
}

DenseMatrix gcn_propagate_backward(const Adjacency& adj, const DenseMatrix& d_out) {
  require_rows(adj, d_out, "gcn_propagate_backward");
  const std::size_t n = adj.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (std::size_t v = 0; v < n; ++v) {
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(adj.degree(static_cast<NodeId>(v)) + 1));
  }
  DenseMatrix d_h(d_out.rows(), d_out.cols());
  for (std::size_t v = 0; v < n; ++v) {
    d_h.row(static_cast<Eigen::Index>(v)) =
        (inv_sqrt[v] * inv_sqrt[v]) * d_out.row(static_cast<Eigen::Index>(v));
  }
  for (std::size_t v = 0; v < n; ++v) {
    for (NodeId u : adj.neighbors(static_cast<NodeId>(v))) {
      d_h.row(u) += (inv_sqrt[v] * inv_sqrt[static_cast<std::size_t>(u)]) *
                    d_out.row(static_cast<Eigen::Index>(v));
    }
  }
  return d_h;
}

DropoutMask DropoutMask::identity() { return DropoutMask{}; }

DropoutMask DropoutMask::sample(Eigen::Index rows, Eigen::Index cols, double p,
                                std::uint64_t seed, std::uint64_t draw) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("dropout probability must lie in [0, 1), got " +
                                std::to_string(p));
  }
  DropoutMask m;
  if (p == 0.0) return m;
  m.identity_ = false;
  m.p_ = p;
  m.seed_ = seed;
  m.draw_ = draw;
  const double scale = 1.0 / (1.0 - p);
  Rng rng(derive_seed(seed, draw));
  m.mask_.resize(rows, cols);
  double* data = m.mask_.data();
  for (Eigen::Index i = 0; i < rows * cols; ++i) {
    data[i] = uniform_unit(rng) < p ? 0.0 : scale;
  }
  return m;
}

DenseMatrix DropoutMask::apply(const DenseMatrix& x) const {
  if (identity_) return x;
  require_same_shape(mask_, x, "dropout");
  return x.cwiseProduct(mask_);
}

}  // namespace nodedup::nn
