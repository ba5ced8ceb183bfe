#include "nodedup/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "nodedup/errors.hpp"

namespace nodedup {
namespace {

constexpr char kMagic[8] = {'N', 'D', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError("truncated checkpoint " + path.string());
  }
  return value;
}

}  // namespace

Parameter& ParamStore::add(std::string name, DenseMatrix init) {
  if (contains(name)) throw std::invalid_argument("duplicate parameter name " + name);
  Parameter p;
  p.name = std::move(name);
  p.grad = DenseMatrix::Zero(init.rows(), init.cols());
  p.first_moment = DenseMatrix::Zero(init.rows(), init.cols());
  p.second_moment = DenseMatrix::Zero(init.rows(), init.cols());
  p.value = std::move(init);
  params_.push_back(std::move(p));
  return params_.back();
}

Parameter& ParamStore::at(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no parameter named " + std::string(name));
}

const Parameter& ParamStore::at(std::string_view name) const {
  return const_cast<ParamStore*>(this)->at(name);
}

const Parameter* ParamStore::find(std::string_view name) const {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t ParamStore::num_scalars() const {
  std::size_t total = 0;
  for (const auto& p : params_) total += static_cast<std::size_t>(p.value.size());
  return total;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& a = params_[i];
    const auto& b = other.params_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      return false;
    }
    if (std::memcmp(a.value.data(), b.value.data(),
                    static_cast<std::size_t>(a.value.size()) * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

void adam_step(ParamStore& params, const AdamOptions& o) {
  params.set_step(params.step() + 1);
  const auto t = static_cast<double>(params.step());
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (auto& p : params.params()) {
    p.first_moment = o.beta1 * p.first_moment + (1.0 - o.beta1) * p.grad;
    p.second_moment =
        o.beta2 * p.second_moment + (1.0 - o.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= o.lr * (p.first_moment.array() / c1) /
                       ((p.second_moment.array() / c2).sqrt() + o.eps);
  }
  params.zero_grad();
}

DenseMatrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * uniform_unit(rng) - 1.0) * a;
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params,
                     std::uint64_t rng_seed) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, rng_seed);
  put<std::uint64_t>(out, params.step());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params.params()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.value.cols()));
    out.write(reinterpret_cast<const char*>(p.value.data()),
              static_cast<std::streamsize>(p.value.size() * sizeof(double)));
  }
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + " is not a nodedup checkpoint");
  }
  Checkpoint ck;
  ck.rng_seed = get<std::uint64_t>(in, path);
  auto step = get<std::uint64_t>(in, path);
  auto count = get<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < count; ++i) {
    auto len = get<std::uint32_t>(in, path);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw DataError("truncated checkpoint " + path.string());
    auto rows = get<std::uint32_t>(in, path);
    auto cols = get<std::uint32_t>(in, path);
    DenseMatrix value(rows, cols);
    if (!in.read(reinterpret_cast<char*>(value.data()),
                 static_cast<std::streamsize>(value.size() * sizeof(double)))) {
      throw DataError("truncated checkpoint " + path.string());
    }
    ck.params.add(std::move(name), std::move(value));
  }
  ck.params.set_step(step);
  return ck;
}

}  // namespace nodedup
