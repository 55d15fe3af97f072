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

#ifndef TRAJKIT__INTERACTION_HPP_
#define TRAJKIT__INTERACTION_HPP_

#include "trajkit/nn/layers.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace trajkit
{

/// Contiguous block of agent rows belonging to one scenario.
struct SceneSlice
{
  Eigen::Index start = 0;
  Eigen::Index count = 0;
};

/**
 * @brief Fully connected per-scene agent graph.
 *
 * Edge (k, l) is position_k - position_l, so edges are antisymmetric and
 * unaffected by a joint translation of the scene.
 */
template <typename Scalar>
struct InteractionGraph
{
  nn::Tensor<Scalar> node_features;  // N x h
  Eigen::Matrix<double, Eigen::Dynamic, 2> positions;
  std::vector<SceneSlice> slices;

  Eigen::Index num_nodes() const { return positions.rows(); }
  Eigen::Vector2d edge(Eigen::Index k, Eigen::Index l) const;
  /// Scene of each node.
  std::vector<Eigen::Index> scene_of_nodes() const;
};

/// Throws SliceMismatch unless @p slices tile the rows of @p encoded in order.
template <typename Scalar>
InteractionGraph<Scalar> build_graph(
  const nn::Tensor<Scalar> & encoded, const Eigen::Matrix<double, Eigen::Dynamic, 2> & positions,
  std::vector<SceneSlice> slices);

/// Ordered same-scene pairs (i, j), i != j, grouped by i.
std::vector<std::pair<Eigen::Index, Eigen::Index>> scene_pairs(const std::vector<SceneSlice> & slices);

/// N x N additive mask: 0 within a scene, -inf across scenes.
template <typename Scalar>
nn::Matrix<Scalar> scene_attention_mask(const std::vector<SceneSlice> & slices);

/**
 * @brief Gated edge-aware convolution with a residual update:
 * v_i' = v_i + sum_j sigmoid(z_ij W_f + b_f) * softplus(z_ij W_s + b_s),
 * z_ij = [v_i | v_j | e_ij].
 */
template <typename Scalar>
class CrystalGcnLayer
{
public:
  CrystalGcnLayer() = default;
  CrystalGcnLayer(nn::ParameterSet<Scalar> & params, const std::string & name, Eigen::Index hidden);

  nn::Tensor<Scalar> operator()(
    const nn::Tensor<Scalar> & features, const InteractionGraph<Scalar> & graph) const;

  const nn::Linear<Scalar> & filter() const { return filter_; }
  const nn::Linear<Scalar> & core() const { return core_; }

private:
  nn::Linear<Scalar> filter_;
  nn::Linear<Scalar> core_;
};

/// Scaled dot-product self-attention restricted to each scene.
template <typename Scalar>
class MultiHeadSelfAttention
{
public:
  MultiHeadSelfAttention() = default;
  /// Throws IndivisibleHeads when @p hidden is not a multiple of @p heads.
  MultiHeadSelfAttention(
    nn::ParameterSet<Scalar> & params, const std::string & name, Eigen::Index hidden, int heads);

  nn::Tensor<Scalar> operator()(
    const nn::Tensor<Scalar> & x, const std::vector<SceneSlice> & slices) const;

  /// Attention matrices, one N x N per head.
  std::vector<nn::Matrix<Scalar>> attention_weights(
    const nn::Tensor<Scalar> & x, const std::vector<SceneSlice> & slices) const;

  int heads() const { return heads_; }
  const nn::Linear<Scalar> & query() const { return query_; }
  const nn::Linear<Scalar> & key() const { return key_; }
  const nn::Linear<Scalar> & value() const { return value_; }
  const nn::Linear<Scalar> & output() const { return output_; }

private:
  std::vector<nn::Tensor<Scalar>> head_attention(
    const nn::Tensor<Scalar> & x, const std::vector<SceneSlice> & slices,
    std::vector<nn::Tensor<Scalar>> * values) const;

  nn::Linear<Scalar> query_, key_, value_, output_;
  int heads_ = 1;
};

/// Graph layers with batch norm and ReLU between them, then attention; one
/// output row per scene taken at the target agent.
template <typename Scalar>
class SocialAttention
{
public:
  SocialAttention() = default;
  SocialAttention(
    nn::ParameterSet<Scalar> & params, const std::string & name, Eigen::Index hidden,
    int gcn_layers, int heads);

  /// All node rows after the attention block.
  nn::Tensor<Scalar> node_outputs(const InteractionGraph<Scalar> & graph, bool train) const;

  /// @p target_rows holds the absolute target row of each scene.
  nn::Tensor<Scalar> operator()(
    const InteractionGraph<Scalar> & graph, const std::vector<Eigen::Index> & target_rows,
    bool train) const;

  const std::vector<CrystalGcnLayer<Scalar>> & gcn_layers() const { return gcn_; }
  const MultiHeadSelfAttention<Scalar> & attention() const { return mhsa_; }

private:
  std::vector<CrystalGcnLayer<Scalar>> gcn_;
  std::vector<nn::BatchNorm<Scalar>> norms_;
  MultiHeadSelfAttention<Scalar> mhsa_;
};

}  // namespace trajkit

#endif  // TRAJKIT__INTERACTION_HPP_
