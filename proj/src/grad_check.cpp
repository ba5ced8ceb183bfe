#include "nodedup/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nodedup/errors.hpp"
#include "nodedup/random.hpp"

namespace nodedup {

GradCheckResult grad_check(Objective& objective, const GradCheckOptions& options) {
  if (objective.is_stochastic()) {
    throw std::logic_error("grad_check requires a deterministic objective (disable dropout)");
  }
  ParamStore& store = objective.params();
  double base = objective.evaluate(/*with_grad=*/true);
  if (!std::isfinite(base)) throw DivergenceError("grad_check: loss is not finite");

  std::vector<DenseMatrix> analytic;
  analytic.reserve(store.size());
  for (const auto& p : store.params()) analytic.push_back(p.grad);

  GradCheckResult result;
  Rng rng(options.seed);
  for (std::size_t t = 0; t < store.size(); ++t) {
    Parameter& p = store.params()[t];
    const auto n = static_cast<std::size_t>(p.value.size());
    std::vector<std::size_t> coords(n);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (n > options.coords_per_tensor) {
      for (std::size_t i = 0; i < options.coords_per_tensor; ++i) {
        std::swap(coords[i], coords[i + uniform_index(rng, n - i)]);
      }
      coords.resize(options.coords_per_tensor);
    }
    for (std::size_t idx : coords) {
      double& x = p.value.data()[idx];
      const double saved = x;
      x = saved + options.eps;
      const double plus = objective.evaluate(false);
      x = saved - options.eps;
      const double minus = objective.evaluate(false);
      x = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw DivergenceError("grad_check: loss is not finite at " + p.name);
      }
      const double num = (plus - minus) / (2.0 * options.eps);
      const double ana = analytic[t].data()[idx];
      const double denom = std::max({std::abs(ana), std::abs(num), options.abs_floor});
      const double rel = std::abs(ana - num) / denom;
      ++result.coords_checked;
      if (rel > result.max_rel_error || result.coords_checked == 1) {
        result.max_rel_error = std::max(result.max_rel_error, rel);
        if (rel >= result.worst.rel_error) result.worst = {p.name, idx, ana, num, rel};
      }
    }
  }
  // Leave the store's gradient buffers as the analytic gradient.
  for (std::size_t t = 0; t < store.size(); ++t) store.params()[t].grad = analytic[t];
  return result;
}

}  // namespace nodedup
