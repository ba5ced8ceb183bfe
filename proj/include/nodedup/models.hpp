#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nodedup/grad_check.hpp"
#include "nodedup/graph.hpp"
#include "nodedup/nn.hpp"
#include "nodedup/params.hpp"

namespace nodedup {

enum class LayerKind : std::uint8_t {
  SeparateWeights,  // h' = h W_self + mean(neighbors) W_neigh
  SharedWeights,    // h' = (normalized propagation of h) W
};

struct EncoderConfig {
  LayerKind kind = LayerKind::SeparateWeights;
  int num_layers = 2;
  int hidden_dim = 256;
  double dropout = 0.5;

  void validate() const;
};

enum class DecoderKind : std::uint8_t { InnerProduct, Mlp };

struct DecoderConfig {
  DecoderKind kind = DecoderKind::InnerProduct;
  // Width of the MLP hidden layer; 0 means the encoder's hidden_dim.
  int mlp_hidden = 0;

  void validate() const;
};

// One separate-weight layer: H' = H W_self + mean_agg(H) W_neigh. Nodes with
// no neighbors get H W_self.
DenseMatrix sage_layer(const DenseMatrix& h, const Adjacency& adj, const DenseMatrix& w_self,
                       const DenseMatrix& w_neigh);

// One shared-weight layer: H' = gcn_propagate(H) W.
DenseMatrix gcn_style_layer(const DenseMatrix& h, const Adjacency& adj, const DenseMatrix& w);

// Dropout configuration for one training forward pass. Masks are drawn from
// (seed, epoch, layer) so repeated passes with the same key agree.
struct DropoutKey {
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
};

// Everything the encoder's backward pass needs from its forward pass.
struct EncoderTape {
  std::vector<DenseMatrix> inputs;      // layer inputs after dropout
  std::vector<DenseMatrix> aggregated;  // mean or propagated inputs
  std::vector<DenseMatrix> pre;         // layer outputs before ReLU
  std::vector<nn::DropoutMask> masks;
};

// L-layer encoder plus decoder for link prediction. Parameter names:
//   enc.<l>.self, enc.<l>.neigh   (SeparateWeights)
//   enc.<l>.weight                (SharedWeights)
//   dec.w1, dec.b1, dec.w2, dec.b2 (Mlp decoder)
// Graph layers carry no bias.
class LinkModel {
 public:
  // Glorot-uniform initialization from `seed`.
  LinkModel(std::size_t input_dim, const EncoderConfig& encoder, const DecoderConfig& decoder,
            std::uint64_t seed);
  // Adopts existing parameters (e.g. a checkpoint). Throws DataError when a
  // name or shape does not match the configuration.
  LinkModel(ParamStore params, std::size_t input_dim, const EncoderConfig& encoder,
            const DecoderConfig& decoder);

  const EncoderConfig& encoder_config() const { return encoder_; }
  const DecoderConfig& decoder_config() const { return decoder_; }
  std::size_t input_dim() const { return input_dim_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Inference-mode encoding: no dropout. Throws DivergenceError on
  // non-finite activations.
  DenseMatrix encode(const Adjacency& adj, const DenseMatrix& x) const;
  // Training-mode encoding. When `dropout` is set and the configured rate is
  // positive, masks are applied to every layer input. `tape` may be null.
  DenseMatrix encode(const Adjacency& adj, const DenseMatrix& x,
                     const std::optional<DropoutKey>& dropout, EncoderTape* tape) const;
  // Accumulates parameter gradients for d loss / d H.
  void encode_backward(const Adjacency& adj, const EncoderTape& tape, const DenseMatrix& d_h);

  // Decoder logit for one pair of embeddings; probability = sigmoid(logit).
  double logit(std::span<const double> h_u, std::span<const double> h_v) const;
  double decode(std::span<const double> h_u, std::span<const double> h_v) const;
  std::vector<double> logits(const DenseMatrix& h, std::span<const Edge> pairs) const;
  // Accumulates decoder parameter gradients and returns d loss / d H.
  DenseMatrix logits_backward(const DenseMatrix& h, std::span<const Edge> pairs,
                              std::span<const double> d_logits);

  // Full forward + backward over labelled pairs: mean BCE, gradients
  // written into the parameter store (previous contents are discarded).
  double loss_and_grad(const Adjacency& adj, const DenseMatrix& x, std::span<const Edge> pairs,
                       std::span<const double> labels, const std::optional<DropoutKey>& dropout);
  // Loss only, no gradients, inference-mode encoder.
  double loss(const Adjacency& adj, const DenseMatrix& x, std::span<const Edge> pairs,
              std::span<const double> labels) const;

 private:
  void init_shapes(std::size_t input_dim);
  int mlp_width() const;

  EncoderConfig encoder_;
  DecoderConfig decoder_;
  std::size_t input_dim_ = 0;
  ParamStore params_;
  // Cached parameter indices.
  std::vector<std::size_t> self_idx_, neigh_idx_, shared_idx_;
  std::size_t dec_w1_ = 0, dec_b1_ = 0, dec_w2_ = 0, dec_b2_ = 0;
};

// Deterministic link-prediction objective for gradient checking.
class LinkObjective : public Objective {
 public:
  LinkObjective(LinkModel& model, const Adjacency& adj, const DenseMatrix& x,
                std::vector<Edge> pairs, std::vector<double> labels,
                std::optional<DropoutKey> dropout = std::nullopt)
      : model_(model),
        adj_(adj),
        x_(x),
        pairs_(std::move(pairs)),
        labels_(std::move(labels)),
        dropout_(dropout) {}

  ParamStore& params() override { return model_.params(); }
  double evaluate(bool with_grad) override;
  bool is_stochastic() const override {
    return dropout_.has_value() && model_.encoder_config().dropout > 0.0;
  }

 private:
  LinkModel& model_;
  const Adjacency& adj_;
  const DenseMatrix& x_;
  std::vector<Edge> pairs_;
  std::vector<double> labels_;
  std::optional<DropoutKey> dropout_;
};

std::string_view to_string(LayerKind k);
std::string_view to_string(DecoderKind k);
LayerKind layer_kind_from_string(std::string_view s);
DecoderKind decoder_kind_from_string(std::string_view s);

}  // namespace nodedup
