#include "nodedup/loss.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nodedup/errors.hpp"
#include "nodedup/nn.hpp"

namespace nodedup {

BceResult bce_with_logits(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size()) {
    throw std::invalid_argument("bce: " + std::to_string(logits.size()) + " logits for " +
                                std::to_string(labels.size()) + " labels");
  }
  if (logits.empty()) throw std::invalid_argument("bce: empty batch");
  BceResult out;
  out.grad.resize(logits.size());
  const double inv_b = 1.0 / static_cast<double>(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double s = logits[i];
    const double y = labels[i];
    if (!std::isfinite(s) || !std::isfinite(y)) {
      throw DivergenceError("bce: non-finite input at position " + std::to_string(i));
    }
    total += std::max(s, 0.0) - s * y + std::log1p(std::exp(-std::abs(s)));
    out.grad[i] = (nn::sigmoid(s) - y) * inv_b;
  }
  out.loss = total * inv_b;
  return out;
}

DistillationLosses distillation_losses(const DenseMatrix& student, const DenseMatrix& teacher) {
  if (student.rows() != teacher.rows() || student.cols() != teacher.cols() || student.rows() == 0) {
    throw std::invalid_argument("distillation_losses: embeddings must share a non-empty shape");
  }
  DistillationLosses out;
  const auto n = static_cast<double>(student.rows());
  bool positive = true;
  double sum_dot = 0.0;
  double sum_log = 0.0;
  for (Eigen::Index v = 0; v < student.rows(); ++v) {
    const double ns = student.row(v).norm();
    const double nt = teacher.row(v).norm();
    const double cos = (ns > 0.0 && nt > 0.0) ? student.row(v).dot(teacher.row(v)) / (ns * nt) : 0.0;
    sum_dot += cos;
    if (cos > 0.0) {
      sum_log += std::log(cos);
    } else {
      positive = false;
    }
  }
  out.kd = -sum_dot / n;
  out.sp = positive ? -sum_log / n : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace nodedup
