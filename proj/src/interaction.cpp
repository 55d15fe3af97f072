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

#include "trajkit/interaction.hpp"

#include "trajkit/error.hpp"

#include <cmath>
#include <limits>

namespace trajkit
{

using nn::Tensor;
using Eigen::Index;

template <typename S>
Eigen::Vector2d InteractionGraph<S>::edge(Index k, Index l) const
{
  return (positions.row(k) - positions.row(l)).transpose();
}

template <typename S>
std::vector<Index> InteractionGraph<S>::scene_of_nodes() const
{
  std::vector<Index> out(static_cast<std::size_t>(num_nodes()));
  for (std::size_t s = 0; s < slices.size(); ++s) {
    for (Index i = 0; i < slices[s].count; ++i) {
      out[static_cast<std::size_t>(slices[s].start + i)] = static_cast<Index>(s);
    }
  }
  return out;
}

template <typename S>
InteractionGraph<S> build_graph(
  const Tensor<S> & encoded, const Eigen::Matrix<double, Eigen::Dynamic, 2> & positions,
  std::vector<SceneSlice> slices)
{
  if (encoded.rows() != positions.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "one position per encoded agent is required");
  }
  Index next = 0;
  for (const auto & s : slices) {
    if (s.start != next || s.count < 1) {
      throw Error(ErrorCode::SliceMismatch, "scene slices must be contiguous and non-empty");
    }
    next += s.count;
  }
  if (next != encoded.rows()) {
    throw Error(
      ErrorCode::SliceMismatch, "scene slices cover " + std::to_string(next) + " of " +
                                  std::to_string(encoded.rows()) + " agents");
  }
  return {encoded, positions, std::move(slices)};
}

std::vector<std::pair<Index, Index>> scene_pairs(const std::vector<SceneSlice> & slices)
{
  std::vector<std::pair<Index, Index>> pairs;
  for (const auto & s : slices) {
    for (Index i = s.start; i < s.start + s.count; ++i) {
      for (Index j = s.start; j < s.start + s.count; ++j) {
        if (i != j) {
          pairs.emplace_back(i, j);
        }
      }
    }
  }
  return pairs;
}

template <typename S>
nn::Matrix<S> scene_attention_mask(const std::vector<SceneSlice> & slices)
{
  Index n = 0;
  for (const auto & s : slices) {
    n += s.count;
  }
  nn::Matrix<S> mask = nn::Matrix<S>::Constant(n, n, -std::numeric_limits<S>::infinity());
  for (const auto & s : slices) {
    mask.block(s.start, s.start, s.count, s.count).setZero();
  }
  return mask;
}

template <typename S>
CrystalGcnLayer<S>::CrystalGcnLayer(nn::ParameterSet<S> & params, const std::string & name, Index hidden)
: filter_(params, name + ".filter", 2 * hidden + 2, hidden),
  core_(params, name + ".core", 2 * hidden + 2, hidden)
{
}

template <typename S>
Tensor<S> CrystalGcnLayer<S>::operator()(
  const Tensor<S> & features, const InteractionGraph<S> & graph) const
{
  if (features.cols() + features.cols() + 2 != filter_.in_features()) {
    throw Error(ErrorCode::ShapeMismatch, "graph layer width does not match node features");
  }
  const auto pairs = scene_pairs(graph.slices);
  if (pairs.empty()) {
    return features;
  }
  std::vector<Index> src, dst;
  nn::Matrix<S> edges(static_cast<Index>(pairs.size()), 2);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    src.push_back(i);
    dst.push_back(j);
    edges.row(static_cast<Index>(p)) = graph.edge(i, j).transpose().template cast<S>();
  }
  const Tensor<S> z = nn::concat_cols<S>(
    {nn::gather_rows(features, src), nn::gather_rows(features, dst), Tensor<S>(edges)});
  const Tensor<S> messages = nn::mul(nn::sigmoid(filter_(z)), nn::softplus(core_(z)));
  return nn::add(features, nn::scatter_add_rows(messages, src, features.rows()));
}

template <typename S>
MultiHeadSelfAttention<S>::MultiHeadSelfAttention(
  nn::ParameterSet<S> & params, const std::string & name, Index hidden, int heads)
: heads_(heads)
{
  if (heads < 1 || hidden % heads != 0) {
    throw Error(
      ErrorCode::IndivisibleHeads,
      std::to_string(hidden) + " features cannot be split into " + std::to_string(heads) + " heads");
  }
  query_ = nn::Linear<S>(params, name + ".query", hidden, hidden);
  key_ = nn::Linear<S>(params, name + ".key", hidden, hidden);
  value_ = nn::Linear<S>(params, name + ".value", hidden, hidden);
  output_ = nn::Linear<S>(params, name + ".output", hidden, hidden);
}

template <typename S>
std::vector<Tensor<S>> MultiHeadSelfAttention<S>::head_attention(
  const Tensor<S> & x, const std::vector<SceneSlice> & slices, std::vector<Tensor<S>> * values) const
{
  if (x.cols() != query_.in_features()) {
    throw Error(ErrorCode::ShapeMismatch, "attention width does not match node features");
  }
  const Index d = x.cols() / heads_;
  const Tensor<S> q = query_(x);
  const Tensor<S> k = key_(x);
  const Tensor<S> v = value_(x);
  const Tensor<S> mask(scene_attention_mask<S>(slices));
  const S inv_sqrt_d = static_cast<S>(1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<Tensor<S>> weights;
  for (int h = 0; h < heads_; ++h) {
    const Tensor<S> qh = nn::slice_cols(q, h * d, d);
    const Tensor<S> kh = nn::slice_cols(k, h * d, d);
    const Tensor<S> logits = nn::add(nn::scale(nn::matmul(qh, nn::transpose(kh)), inv_sqrt_d), mask);
    weights.push_back(nn::softmax(logits, 1));
    if (values) {
      values->push_back(nn::slice_cols(v, h * d, d));
    }
  }
  return weights;
}

template <typename S>
Tensor<S> MultiHeadSelfAttention<S>::operator()(
  const Tensor<S> & x, const std::vector<SceneSlice> & slices) const
{
  std::vector<Tensor<S>> values;
  const auto weights = head_attention(x, slices, &values);
  std::vector<Tensor<S>> heads;
  for (std::size_t h = 0; h < weights.size(); ++h) {
    heads.push_back(nn::matmul(weights[h], values[h]));
  }
  return output_(nn::concat_cols(heads));
}

template <typename S>
std::vector<nn::Matrix<S>> MultiHeadSelfAttention<S>::attention_weights(
  const Tensor<S> & x, const std::vector<SceneSlice> & slices) const
{
  nn::NoGradGuard no_grad;
  std::vector<nn::Matrix<S>> out;
  for (const auto & w : head_attention(x, slices, nullptr)) {
    out.push_back(w.value());
  }
  return out;
}

template <typename S>
SocialAttention<S>::SocialAttention(
  nn::ParameterSet<S> & params, const std::string & name, Index hidden, int gcn_layers, int heads)
{
  for (int l = 0; l < gcn_layers; ++l) {
    gcn_.emplace_back(params, name + ".gcn" + std::to_string(l), hidden);
    if (l + 1 < gcn_layers) {
      norms_.emplace_back(params, name + ".gcn_bn" + std::to_string(l), hidden);
    }
  }
  mhsa_ = MultiHeadSelfAttention<S>(params, name + ".mhsa", hidden, heads);
}

template <typename S>
Tensor<S> SocialAttention<S>::node_outputs(const InteractionGraph<S> & graph, bool train) const
{
  Tensor<S> v = graph.node_features;
  for (std::size_t l = 0; l < gcn_.size(); ++l) {
    v = gcn_[l](v, graph);
    if (l < norms_.size()) {
      v = nn::relu(norms_[l](v, train));
    }
  }
  return mhsa_(v, graph.slices);
}

template <typename S>
Tensor<S> SocialAttention<S>::operator()(
  const InteractionGraph<S> & graph, const std::vector<Index> & target_rows, bool train) const
{
  if (target_rows.size() != graph.slices.size()) {
    throw Error(ErrorCode::SliceMismatch, "one target row per scene is required");
  }
  return nn::gather_rows(node_outputs(graph, train), target_rows);
}

template struct InteractionGraph<float>;
template struct InteractionGraph<double>;
template InteractionGraph<float> build_graph(
  const Tensor<float> &, const Eigen::Matrix<double, Eigen::Dynamic, 2> &, std::vector<SceneSlice>);
template InteractionGraph<double> build_graph(
  const Tensor<double> &, const Eigen::Matrix<double, Eigen::Dynamic, 2> &, std::vector<SceneSlice>);
template nn::Matrix<float> scene_attention_mask(const std::vector<SceneSlice> &);
template nn::Matrix<double> scene_attention_mask(const std::vector<SceneSlice> &);
template class CrystalGcnLayer<float>;
template class CrystalGcnLayer<double>;
template class MultiHeadSelfAttention<float>;
template class MultiHeadSelfAttention<double>;
template class SocialAttention<float>;
template class SocialAttention<double>;

}  // namespace trajkit
