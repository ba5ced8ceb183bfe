#include "nodedup/models.hpp"

#include <string>

#include "nodedup/errors.hpp"
#include "nodedup/loss.hpp"

namespace nodedup {
namespace {

std::string layer_name(int l, const char* what) {
  return "enc." + std::to_string(l) + "." + what;
}

Eigen::Map<const Eigen::RowVectorXd> as_row(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

void check_finite(const DenseMatrix& m, int layer) {
  if (!nn::all_finite(m)) {
    throw DivergenceError("non-finite activations at encoder layer " + std::to_string(layer));
  }
}

}  // namespace

void EncoderConfig::validate() const {
  if (num_layers < 1) throw ConfigError("model.num_layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("model.hidden_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model.dropout must lie in [0, 1)");
}

void DecoderConfig::validate() const {
  if (mlp_hidden < 0) throw ConfigError("model.mlp_hidden must be >= 0");
}

DenseMatrix sage_layer(const DenseMatrix& h, const Adjacency& adj, const DenseMatrix& w_self,
                       const DenseMatrix& w_neigh) {
  DenseMatrix out = nn::matmul(h, w_self);
  out += nn::matmul(nn::mean_aggregate(adj, h), w_neigh);
  return out;
}

DenseMatrix gcn_style_layer(const DenseMatrix& h, const Adjacency& adj, const DenseMatrix& w) {
  return nn::matmul(nn::gcn_propagate(adj, h), w);
}

LinkModel::LinkModel(std::size_t input_dim, const EncoderConfig& encoder,
                     const DecoderConfig& decoder, std::uint64_t seed)
    : encoder_(encoder), decoder_(decoder), input_dim_(input_dim) {
  encoder_.validate();
  decoder_.validate();
  if (input_dim == 0) throw ConfigError("input feature dimension must be >= 1");
  Rng rng(seed);
  const auto d = static_cast<Eigen::Index>(encoder_.hidden_dim);
  for (int l = 0; l < encoder_.num_layers; ++l) {
    const Eigen::Index in = l == 0 ? static_cast<Eigen::Index>(input_dim) : d;
    if (encoder_.kind == LayerKind::SeparateWeights) {
      params_.add(layer_name(l, "self"), glorot_uniform(in, d, rng));
      params_.add(layer_name(l, "neigh"), glorot_uniform(in, d, rng));
    } else {
      params_.add(layer_name(l, "weight"), glorot_uniform(in, d, rng));
    }
  }
  if (decoder_.kind == DecoderKind::Mlp) {
    const auto w = static_cast<Eigen::Index>(mlp_width());
    params_.add("dec.w1", glorot_uniform(d, w, rng));
    params_.add("dec.b1", DenseMatrix::Zero(1, w));
    params_.add("dec.w2", glorot_uniform(w, 1, rng));
    params_.add("dec.b2", DenseMatrix::Zero(1, 1));
  }
  init_shapes(input_dim);
}

LinkModel::LinkModel(ParamStore params, std::size_t input_dim, const EncoderConfig& encoder,
                     const DecoderConfig& decoder)
    : encoder_(encoder), decoder_(decoder), input_dim_(input_dim), params_(std::move(params)) {
  encoder_.validate();
  decoder_.validate();
  init_shapes(input_dim);
}

int LinkModel::mlp_width() const {
  return decoder_.mlp_hidden > 0 ? decoder_.mlp_hidden : encoder_.hidden_dim;
}

void LinkModel::init_shapes(std::size_t input_dim) {
  auto index_of = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    const auto& ps = params_.params();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (ps[i].name != name) continue;
      if (ps[i].value.rows() != rows || ps[i].value.cols() != cols) {
        throw DataError("parameter " + name + " has shape " + std::to_string(ps[i].value.rows()) +
                        "x" + std::to_string(ps[i].value.cols()) + ", expected " +
                        std::to_string(rows) + "x" + std::to_string(cols));
      }
      return i;
    }
    throw DataError("missing parameter " + name);
  };
  const auto d = static_cast<Eigen::Index>(encoder_.hidden_dim);
  std::size_t expected = 0;
  for (int l = 0; l < encoder_.num_layers; ++l) {
    const Eigen::Index in = l == 0 ? static_cast<Eigen::Index>(input_dim) : d;
    if (encoder_.kind == LayerKind::SeparateWeights) {
      self_idx_.push_back(index_of(layer_name(l, "self"), in, d));
      neigh_idx_.push_back(index_of(layer_name(l, "neigh"), in, d));
      expected += 2;
    } else {
      shared_idx_.push_back(index_of(layer_name(l, "weight"), in, d));
      expected += 1;
    }
  }
  if (decoder_.kind == DecoderKind::Mlp) {
    const auto w = static_cast<Eigen::Index>(mlp_width());
    dec_w1_ = index_of("dec.w1", d, w);
    dec_b1_ = index_of("dec.b1", 1, w);
    dec_w2_ = index_of("dec.w2", w, 1);
    dec_b2_ = index_of("dec.b2", 1, 1);
    expected += 4;
  }
  if (params_.size() != expected) {
    throw DataError("parameter store holds " + std::to_string(params_.size()) +
                    " tensors, configuration expects " + std::to_string(expected));
  }
}

DenseMatrix LinkModel::encode(const Adjacency& adj, const DenseMatrix& x) const {
  return encode(adj, x, std::nullopt, nullptr);
}

DenseMatrix LinkModel::encode(const Adjacency& adj, const DenseMatrix& x,
                              const std::optional<DropoutKey>& dropout, EncoderTape* tape) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim_) {
    throw std::invalid_argument("encode: features have " + std::to_string(x.cols()) +
                                " columns, model expects " + std::to_string(input_dim_));
  }
  if (static_cast<std::size_t>(x.rows()) != adj.num_nodes()) {
    throw std::invalid_argument("encode: " + std::to_string(x.rows()) + " feature rows for " +
                                std::to_string(adj.num_nodes()) + " nodes");
  }
  if (tape != nullptr) *tape = EncoderTape{};
  const auto& ps = params_.params();
  const bool use_dropout = dropout.has_value() && encoder_.dropout > 0.0;
  DenseMatrix h = x;
  for (int l = 0; l < encoder_.num_layers; ++l) {
    nn::DropoutMask mask =
        use_dropout ? nn::DropoutMask::sample(h.rows(), h.cols(), encoder_.dropout,
                                              derive_seed(dropout->seed, dropout->epoch),
                                              static_cast<std::uint64_t>(l))
                    : nn::DropoutMask::identity();
    DenseMatrix in = mask.apply(h);
    DenseMatrix agg;
    DenseMatrix z;
    const auto ul = static_cast<std::size_t>(l);
    if (encoder_.kind == LayerKind::SeparateWeights) {
      agg = nn::mean_aggregate(adj, in);
      z = nn::matmul(in, ps[self_idx_[ul]].value);
      z += nn::matmul(agg, ps[neigh_idx_[ul]].value);
    } else {
      agg = nn::gcn_propagate(adj, in);
      z = nn::matmul(agg, ps[shared_idx_[ul]].value);
    }
    check_finite(z, l);
    const bool last = l + 1 == encoder_.num_layers;
    DenseMatrix next = last ? z : nn::relu(z);
    if (tape != nullptr) {
      tape->inputs.push_back(std::move(in));
      tape->aggregated.push_back(std::move(agg));
      tape->pre.push_back(std::move(z));
      tape->masks.push_back(std::move(mask));
    }
    h = std::move(next);
  }
  return h;
}

void LinkModel::encode_backward(const Adjacency& adj, const EncoderTape& tape,
                                const DenseMatrix& d_h) {
  auto& ps = params_.params();
  DenseMatrix d_z = d_h;
  for (int l = encoder_.num_layers - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    const DenseMatrix& in = tape.inputs[ul];
    const DenseMatrix& agg = tape.aggregated[ul];
    DenseMatrix d_in;
    if (encoder_.kind == LayerKind::SeparateWeights) {
      Parameter& w_self = ps[self_idx_[ul]];
      Parameter& w_neigh = ps[neigh_idx_[ul]];
      w_self.grad += nn::matmul_tn(in, d_z);
      w_neigh.grad += nn::matmul_tn(agg, d_z);
      if (l == 0) break;
      d_in = nn::matmul_nt(d_z, w_self.value);
      d_in += nn::mean_aggregate_backward(adj, nn::matmul_nt(d_z, w_neigh.value));
    } else {
      Parameter& w = ps[shared_idx_[ul]];
      w.grad += nn::matmul_tn(agg, d_z);
      if (l == 0) break;
      d_in = nn::gcn_propagate_backward(adj, nn::matmul_nt(d_z, w.value));
    }
    DenseMatrix d_prev = tape.masks[ul].backward(d_in);
    d_z = nn::relu_backward(tape.pre[ul - 1], d_prev);
  }
}

double LinkModel::logit(std::span<const double> h_u, std::span<const double> h_v) const {
  if (h_u.size() != h_v.size() || h_u.size() != static_cast<std::size_t>(encoder_.hidden_dim)) {
    throw std::invalid_argument("decode: embedding lengths " + std::to_string(h_u.size()) + " and " +
                                std::to_string(h_v.size()) + ", expected " +
                                std::to_string(encoder_.hidden_dim));
  }
  if (decoder_.kind == DecoderKind::InnerProduct) return as_row(h_u).dot(as_row(h_v));
  const auto& ps = params_.params();
  Eigen::RowVectorXd prod = as_row(h_u).cwiseProduct(as_row(h_v));
  Eigen::RowVectorXd a = prod * ps[dec_w1_].value + ps[dec_b1_].value.row(0);
  a = a.cwiseMax(0.0);
  return a.dot(ps[dec_w2_].value.col(0).transpose()) + ps[dec_b2_].value(0, 0);
}

double LinkModel::decode(std::span<const double> h_u, std::span<const double> h_v) const {
  return nn::sigmoid(logit(h_u, h_v));
}

std::vector<double> LinkModel::logits(const DenseMatrix& h, std::span<const Edge> pairs) const {
  std::vector<double> out(pairs.size());
  if (decoder_.kind == DecoderKind::InnerProduct) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      out[i] = h.row(pairs[i].u).dot(h.row(pairs[i].v));
    }
    return out;
  }
  const auto& ps = params_.params();
  DenseMatrix prod(static_cast<Eigen::Index>(pairs.size()), h.cols());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    prod.row(static_cast<Eigen::Index>(i)) = h.row(pairs[i].u).cwiseProduct(h.row(pairs[i].v));
  }
  DenseMatrix a = nn::relu(nn::add_row(nn::matmul(prod, ps[dec_w1_].value), ps[dec_b1_].value));
  DenseMatrix s = nn::matmul(a, ps[dec_w2_].value);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out[i] = s(static_cast<Eigen::Index>(i), 0) + ps[dec_b2_].value(0, 0);
  }
  return out;
}

DenseMatrix LinkModel::logits_backward(const DenseMatrix& h, std::span<const Edge> pairs,
                                       std::span<const double> d_logits) {
  DenseMatrix d_h = DenseMatrix::Zero(h.rows(), h.cols());
  if (decoder_.kind == DecoderKind::InnerProduct) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double g = d_logits[i];
      d_h.row(pairs[i].u) += g * h.row(pairs[i].v);
      d_h.row(pairs[i].v) += g * h.row(pairs[i].u);
    }
    return d_h;
  }
  auto& ps = params_.params();
  const auto b = static_cast<Eigen::Index>(pairs.size());
  DenseMatrix prod(b, h.cols());
  for (Eigen::Index i = 0; i < b; ++i) {
    const Edge& e = pairs[static_cast<std::size_t>(i)];
    prod.row(i) = h.row(e.u).cwiseProduct(h.row(e.v));
  }
  DenseMatrix pre = nn::add_row(nn::matmul(prod, ps[dec_w1_].value), ps[dec_b1_].value);
  DenseMatrix act = nn::relu(pre);
  DenseMatrix d_s(b, 1);
  for (Eigen::Index i = 0; i < b; ++i) d_s(i, 0) = d_logits[static_cast<std::size_t>(i)];

  ps[dec_b2_].grad(0, 0) += d_s.sum();
  ps[dec_w2_].grad += nn::matmul_tn(act, d_s);
  DenseMatrix d_pre = nn::relu_backward(pre, nn::matmul_nt(d_s, ps[dec_w2_].value));
  ps[dec_b1_].grad += nn::add_row_backward(d_pre);
  ps[dec_w1_].grad += nn::matmul_tn(prod, d_pre);
  DenseMatrix d_prod = nn::matmul_nt(d_pre, ps[dec_w1_].value);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Edge& e = pairs[static_cast<std::size_t>(i)];
    d_h.row(e.u) += d_prod.row(i).cwiseProduct(h.row(e.v));
    d_h.row(e.v) += d_prod.row(i).cwiseProduct(h.row(e.u));
  }
  return d_h;
}

double LinkModel::loss_and_grad(const Adjacency& adj, const DenseMatrix& x,
                                std::span<const Edge> pairs, std::span<const double> labels,
                                const std::optional<DropoutKey>& dropout) {
  params_.zero_grad();
  EncoderTape tape;
  DenseMatrix h = encode(adj, x, dropout, &tape);
  std::vector<double> s = logits(h, pairs);
  BceResult bce = bce_with_logits(s, labels);
  DenseMatrix d_h = logits_backward(h, pairs, bce.grad);
  encode_backward(adj, tape, d_h);
  return bce.loss;
}

double LinkModel::loss(const Adjacency& adj, const DenseMatrix& x, std::span<const Edge> pairs,
                       std::span<const double> labels) const {
  DenseMatrix h = encode(adj, x);
  return bce_with_logits(logits(h, pairs), labels).loss;
}

double LinkObjective::evaluate(bool with_grad) {
  if (with_grad) return model_.loss_and_grad(adj_, x_, pairs_, labels_, dropout_);
  if (dropout_) {
    DenseMatrix h = model_.encode(adj_, x_, dropout_, nullptr);
    return bce_with_logits(model_.logits(h, pairs_), labels_).loss;
  }
  return model_.loss(adj_, x_, pairs_, labels_);
}

std::string_view to_string(LayerKind k) {
  return k == LayerKind::SeparateWeights ? "separate_weights" : "shared_weights";
}

std::string_view to_string(DecoderKind k) {
  return k == DecoderKind::InnerProduct ? "inner_product" : "mlp";
}

LayerKind layer_kind_from_string(std::string_view s) {
  if (s == "separate_weights" || s == "sage") return LayerKind::SeparateWeights;
  if (s == "shared_weights" || s == "gcn") return LayerKind::SharedWeights;
  throw ConfigError("unknown encoder kind '" + std::string(s) + "'");
}

DecoderKind decoder_kind_from_string(std::string_view s) {
  if (s == "inner_product") return DecoderKind::InnerProduct;
  if (s == "mlp") return DecoderKind::Mlp;
  throw ConfigError("unknown decoder kind '" + std::string(s) + "'");
}

}  // namespace nodedup
