// Copyright 2026 The trajkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRAJKIT__PREDICTOR_HPP_
#define TRAJKIT__PREDICTOR_HPP_

#include "trajkit/batch.hpp"
#include "trajkit/interaction.hpp"
#include "trajkit/nn/layers.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace trajkit
{

enum class Variant { Social, Map };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view s);

struct ModelConfig
{
  Variant variant = Variant::Social;
  int h_social = 64;
  int h_map = 128;
  /// Decoder width of the map variant; its 320-wide context is projected to this.
  int h_decoder_map = 192;
  int heads = 4;
  int gcn_layers = 2;
  int window = 20;
  int modes = 6;
  int obs_len = 20;
  int pred_len = 30;
  int centerlines = 3;
  int plausible_points = 200;
  int confidence_hidden = 60;
  double dropout = 0.1;

  int decoder_hidden() const { return variant == Variant::Social ? h_social : h_decoder_map; }
  int context_width() const { return variant == Variant::Social ? h_social : h_social + 2 * h_map; }
  /// Throws InvalidArgument or IndivisibleHeads.
  void validate() const;
};

std::string model_config_to_json(const ModelConfig & c);
ModelConfig model_config_from_json(const std::string & text);

/// k modes of pred_len points in the target frame with their probabilities.
struct PredictionSet
{
  std::vector<Polyline> trajectories;
  Eigen::VectorXd confidences;
};

template <typename Scalar>
struct ForwardOutput
{
  nn::Tensor<Scalar> positions;    // (k*B) x 2*pred_len, row m*B + b
  nn::Tensor<Scalar> confidences;  // B x k
};

/// Autoregressive decoder state, resumable at any step.
template <typename Scalar>
struct DecoderState
{
  nn::LstmState<Scalar> lstm;
  nn::Tensor<Scalar> window;            // (k*B) x 2*window displacements
  nn::Tensor<Scalar> window_positions;  // (k*B) x 2*window absolute positions
  nn::Tensor<Scalar> position;          // (k*B) x 2
  std::vector<nn::Tensor<Scalar>> emitted;  // per step, (k*B) x 2 positions
  /// (k*B) x 2*pred_len, the centerline of each row's mode; padded ones are zero.
  nn::Matrix<Scalar> centerlines;
  int step = 0;
};

/**
 * @brief Encoder, social attention, optional map encoders, temporal decoder
 * with per-mode heads, and the confidence head.
 */
template <typename Scalar>
class Predictor
{
public:
  explicit Predictor(const ModelConfig & config, std::uint64_t seed = 0);

  const ModelConfig & config() const { return config_; }
  nn::ParameterSet<Scalar> & params() { return params_; }
  const nn::ParameterSet<Scalar> & params() const { return params_; }

  /// Final LSTM hidden state per agent row; N x h_social.
  nn::Tensor<Scalar> encode_history(const Batch & batch) const;
  /// Target rows after graph layers and attention; B x h_social.
  nn::Tensor<Scalar> social_context(const Batch & batch, bool train) const;

  struct MapContext
  {
    nn::Tensor<Scalar> static_ctx;    // B x h_map
    nn::Tensor<Scalar> specific_ctx;  // (M*B) x h_map, row c*B + b
  };
  /// Throws MissingPrior when the batch carries no prior.
  MapContext encode_map(const Batch & batch, bool train, std::mt19937_64 & rng) const;

  /// Decoder initial hidden state, (k*B) x decoder_hidden.
  nn::Tensor<Scalar> traffic_context(const Batch & batch, bool train, std::mt19937_64 & rng) const;

  DecoderState<Scalar> init_decoder(const Batch & batch, const nn::Tensor<Scalar> & h0) const;
  /// Advance @p steps decoder steps, stopping at pred_len.
  void decode(DecoderState<Scalar> & state, int steps) const;
  /// Emitted positions as (k*B) x 2*pred_len.
  nn::Tensor<Scalar> decoded_positions(const DecoderState<Scalar> & state) const;

  /// B x k probabilities from mode-major positions.
  nn::Tensor<Scalar> confidence(const nn::Tensor<Scalar> & positions) const;

  ForwardOutput<Scalar> forward(const Batch & batch, bool train, std::mt19937_64 & rng) const;

  /// Evaluation-mode forward without tape recording.
  std::vector<PredictionSet> predict(const Batch & batch) const;

private:
  ModelConfig config_;
  nn::ParameterSet<Scalar> params_;
  nn::LstmCell<Scalar> encoder_;
  SocialAttention<Scalar> social_;
  nn::MlpEncoder<Scalar> area_encoder_;
  nn::MlpEncoder<Scalar> centerline_encoder_;
  nn::Linear<Scalar> context_projection_;
  nn::Linear<Scalar> spatial_embedding_;
  nn::Linear<Scalar> distance_embedding_;
  nn::LstmCell<Scalar> decoder_;
  std::vector<nn::Linear<Scalar>> heads_;
  nn::Linear<Scalar> conf_in_;
  nn::Linear<Scalar> conf_residual_;
  nn::Linear<Scalar> conf_out_;
};

/// Exact learnable parameter count implied by the configuration.
std::size_t count_params(const ModelConfig & config);

/**
 * @brief Forward FLOPs for one scenario with @p agents agents: one per
 * multiply-accumulate, one per element of each nonlinearity and
 * normalization.
 */
std::uint64_t count_flops(const ModelConfig & config, int agents = 10);

}  // namespace trajkit

#endif  // TRAJKIT__PREDICTOR_HPP_
