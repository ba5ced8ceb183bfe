#pragma once

#include <cstddef>
#include <cstdint>

#include "nodedup/graph.hpp"

// Dense building blocks with hand-written vector-Jacobian products. Every
// backward takes what its forward saw and the upstream gradient, and returns
// (or accumulates) gradients with respect to the forward inputs.
namespace nodedup::nn {

// Products use a fixed accumulation order: every output row of matmul is
// summed over k ascending and depends only on the matching input row, so a
// row's result does not change with the number or position of other rows.
// Throws std::invalid_argument on non-conformable shapes.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a b^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
// Given C = A B and dC: dA = dC B^T, dB = A^T dC. Either output may be null.
void matmul_backward(const DenseMatrix& a, const DenseMatrix& b, const DenseMatrix& d_out,
                     DenseMatrix* d_a, DenseMatrix* d_b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
// Broadcast a 1 x C row over every row of `a`.
DenseMatrix add_row(const DenseMatrix& a, const DenseMatrix& row);
// Gradient of add_row with respect to the broadcast row: column sums.
DenseMatrix add_row_backward(const DenseMatrix& d_out);

DenseMatrix relu(const DenseMatrix& x);
// dy masked by x > 0.
DenseMatrix relu_backward(const DenseMatrix& x, const DenseMatrix& d_out);

double sigmoid(double x);
DenseMatrix sigmoid(const DenseMatrix& x);
// In terms of the forward output y = sigmoid(x).
DenseMatrix sigmoid_backward(const DenseMatrix& y, const DenseMatrix& d_out);

bool all_finite(const DenseMatrix& m);

// Row v of the result is the mean of h's rows over neighbors(v); rows with no
// neighbors are zero. A self-loop entry contributes h_v itself.
DenseMatrix mean_aggregate(const Adjacency& adj, const DenseMatrix& h);
// Transpose action: row u receives sum over v with u in N(v) of d_out_v / deg(v).
DenseMatrix mean_aggregate_backward(const Adjacency& adj, const DenseMatrix& d_out);

// Symmetric-normalized propagation with an implicit self term:
//   out_v = h_v / (d_v + 1) + sum_{u in N(v)} h_u / sqrt((d_v + 1)(d_u + 1)).
DenseMatrix gcn_propagate(const Adjacency& adj, const DenseMatrix& h);
DenseMatrix gcn_propagate_backward(const Adjacency& adj, const DenseMatrix& d_out);

// Inverted dropout mask. In inference mode the mask is the identity.
class DropoutMask {
 public:
  static DropoutMask identity();
  // Each entry is kept with probability 1 - p and scaled by 1 / (1 - p).
  // `seed` and `draw` fully determine the mask.
  static DropoutMask sample(Eigen::Index rows, Eigen::Index cols, double p, std::uint64_t seed,
                            std::uint64_t draw);

  bool is_identity() const { return identity_; }
  double keep_probability() const { return 1.0 - p_; }
  double scale() const { return identity_ ? 1.0 : 1.0 / (1.0 - p_); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draw() const { return draw_; }
  const DenseMatrix& mask() const { return mask_; }

  DenseMatrix apply(const DenseMatrix& x) const;
  DenseMatrix backward(const DenseMatrix& d_out) const { return apply(d_out); }

 private:
  bool identity_ = true;
  double p_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t draw_ = 0;
  DenseMatrix mask_;  // entries in {0, scale}
};

}  // namespace nodedup::nn
