#pragma once

#include <span>
#include <vector>

#include "nodedup/graph.hpp"

namespace nodedup {

struct BceResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logit, already divided by the batch size
};

// Mean binary cross-entropy of sigmoid(logits) against labels in {0, 1},
// evaluated in the stable form max(s, 0) - s*y + log1p(exp(-|s|)).
// Throws DivergenceError on non-finite logits and std::invalid_argument on a
// size mismatch or an empty batch.
BceResult bce_with_logits(std::span<const double> logits, std::span<const double> labels);

// The two losses that relate self-distillation to duplicating nodes, for
// row-normalized student and teacher embeddings:
//   kd = -mean_v  h_v . t_v
//   sp = -mean_v  log(h_v . t_v)
// `sp` is only defined when every cosine is positive; otherwise it is +inf.
struct DistillationLosses {
  double kd = 0.0;
  double sp = 0.0;
};
DistillationLosses distillation_losses(const DenseMatrix& student, const DenseMatrix& teacher);

}  // namespace nodedup
