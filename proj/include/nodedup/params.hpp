#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nodedup/graph.hpp"
#include "nodedup/random.hpp"

namespace nodedup {

struct Parameter {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;
  DenseMatrix first_moment;
  DenseMatrix second_moment;
};

// Named parameters in insertion order, each with its gradient buffer and
// Adam moments.
class ParamStore {
 public:
  // Throws std::invalid_argument if the name is taken.
  Parameter& add(std::string name, DenseMatrix init);

  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  const Parameter* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t num_scalars() const;

  void zero_grad();
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

  // Values only; gradients and moments are not compared.
  bool same_values(const ParamStore& other) const;

 private:
  std::vector<Parameter> params_;
  std::uint64_t step_ = 0;
};

struct AdamOptions {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam update over every parameter, then zero_grad().
// Increments the store's step counter.
void adam_step(ParamStore& params, const AdamOptions& options);

// U(-a, a) with a = sqrt(6 / (rows + cols)).
DenseMatrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Binary checkpoint: "NDCKPT01", u64 rng seed, u64 step, u32 count, then per
// parameter u32 name length, name bytes, u32 rows, u32 cols and rows*cols
// little-endian float64 values in row-major order.
struct Checkpoint {
  ParamStore params;
  std::uint64_t rng_seed = 0;
};

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     std::uint64_t rng_seed);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nodedup
