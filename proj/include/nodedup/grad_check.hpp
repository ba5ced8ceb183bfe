#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nodedup/params.hpp"

namespace nodedup {

// Something with a scalar loss over the parameters in `params()`.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual ParamStore& params() = 0;
  // Loss at the current parameter values. When `with_grad` is set the
  // analytic gradient is written into each parameter's grad buffer
  // (overwriting it).
  virtual double evaluate(bool with_grad) = 0;
  // Stochastic objectives (dropout) cannot be checked by finite differences.
  virtual bool is_stochastic() const { return false; }
};

struct GradCheckOptions {
  double eps = 1e-5;
  // Coordinates sampled per tensor; tensors with fewer entries are checked
  // exhaustively.
  std::size_t coords_per_tensor = 200;
  std::uint64_t seed = 0;
  // Denominator floor: smaller gradients are compared in absolute terms.
  double abs_floor = 1e-6;
};

struct GradCheckEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  GradCheckEntry worst;
};

// Central finite differences against the analytic gradient. Relative error is
// |a - n| / max(|a|, |n|, abs_floor). Throws std::logic_error for a stochastic
// objective and DivergenceError on a non-finite loss. Parameter values are
// restored on return.
GradCheckResult grad_check(Objective& objective, const GradCheckOptions& options = {});

}  // namespace nodedup
