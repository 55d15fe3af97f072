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

#include "trajkit/predictor.hpp"

#include "trajkit/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace trajkit
{

using nn::Tensor;
using Eigen::Index;

std::string_view to_string(Variant v) noexcept
{
  return v == Variant::Social ? "social" : "map";
}

Variant parse_variant(std::string_view s)
{
  if (s == "social") return Variant::Social;
  if (s == "map") return Variant::Map;
  throw Error(ErrorCode::InvalidArgument, "unknown variant '" + std::string(s) + "'");
}

void ModelConfig::validate() const
{
  const auto positive = [](int v, const char * name) {
    if (v < 1) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be >= 1");
    }
  };
  positive(h_social, "h_social");
  positive(h_map, "h_map");
  positive(h_decoder_map, "h_decoder_map");
  positive(heads, "heads");
  positive(gcn_layers, "gcn_layers");
  positive(window, "window");
  positive(modes, "modes");
  positive(obs_len, "obs_len");
  positive(pred_len, "pred_len");
  positive(centerlines, "centerlines");
  positive(plausible_points, "plausible_points");
  positive(confidence_hidden, "confidence_hidden");
  if (obs_len < 2 || window > obs_len) {
    throw Error(ErrorCode::InvalidArgument, "window must not exceed obs_len (>= 2)");
  }
  if (h_social % heads != 0) {
    throw Error(ErrorCode::IndivisibleHeads, "h_social must be divisible by heads");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dropout must lie in [0, 1)");
  }
}

std::string model_config_to_json(const ModelConfig & c)
{
  const nlohmann::json j = {
    {"variant", std::string(to_string(c.variant))},
    {"h_social", c.h_social},
    {"h_map", c.h_map},
    {"h_decoder_map", c.h_decoder_map},
    {"heads", c.heads},
    {"gcn_layers", c.gcn_layers},
    {"window", c.window},
    {"modes", c.modes},
    {"obs_len", c.obs_len},
    {"pred_len", c.pred_len},
    {"centerlines", c.centerlines},
    {"plausible_points", c.plausible_points},
    {"confidence_hidden", c.confidence_hidden},
    {"dropout", c.dropout}};
  return j.dump();
}

ModelConfig model_config_from_json(const std::string & text)
{
  ModelConfig c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.variant = parse_variant(j.value("variant", std::string("social")));
    c.h_social = j.value("h_social", c.h_social);
    c.h_map = j.value("h_map", c.h_map);
    c.h_decoder_map = j.value("h_decoder_map", c.h_decoder_map);
    c.heads = j.value("heads", c.heads);
    c.gcn_layers = j.value("gcn_layers", c.gcn_layers);
    c.window = j.value("window", c.window);
    c.modes = j.value("modes", c.modes);
    c.obs_len = j.value("obs_len", c.obs_len);
    c.pred_len = j.value("pred_len", c.pred_len);
    c.centerlines = j.value("centerlines", c.centerlines);
    c.plausible_points = j.value("plausible_points", c.plausible_points);
    c.confidence_hidden = j.value("confidence_hidden", c.confidence_hidden);
    c.dropout = j.value("dropout", c.dropout);
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::MalformedInput, "model config: " + std::string(e.what()));
  }
  c.validate();
  return c;
}

template <typename S>
Predictor<S>::Predictor(const ModelConfig & config, std::uint64_t seed)
: config_(config), params_(seed)
{
  config_.validate();
  const Index hs = config_.h_social;
  const Index hd = config_.decoder_hidden();
  const Index w2 = 2 * config_.window;
  encoder_ = nn::LstmCell<S>(params_, "encoder", 2, hs);
  social_ = SocialAttention<S>(params_, "social", hs, config_.gcn_layers, config_.heads);
  if (config_.variant == Variant::Map) {
    area_encoder_ = nn::MlpEncoder<S>(
      params_, "area_encoder", 2 * config_.plausible_points, config_.h_map, config_.h_map,
      config_.dropout);
    centerline_encoder_ = nn::MlpEncoder<S>(
      params_, "centerline_encoder", 2 * config_.pred_len, config_.h_map, config_.h_map,
      config_.dropout);
    context_projection_ = nn::Linear<S>(params_, "context_projection", config_.context_width(), hd);
    distance_embedding_ = nn::Linear<S>(params_, "decoder.distance", w2, w2);
  }
  spatial_embedding_ = nn::Linear<S>(params_, "decoder.spatial", w2, w2);
  decoder_ = nn::LstmCell<S>(params_, "decoder.lstm", w2 + 1, hd);
  for (int m = 0; m < config_.modes; ++m) {
    heads_.emplace_back(params_, "decoder.head" + std::to_string(m), hd, 2);
  }
  const Index ch = config_.confidence_hidden;
  conf_in_ = nn::Linear<S>(params_, "confidence.fc_in", config_.modes * 2 * config_.pred_len, ch);
  conf_residual_ = nn::Linear<S>(params_, "confidence.residual", ch, ch);
  conf_out_ = nn::Linear<S>(params_, "confidence.fc_out", ch, config_.modes);
}

template <typename S>
Tensor<S> Predictor<S>::encode_history(const Batch & batch) const
{
  if (static_cast<int>(batch.steps.size()) != config_.obs_len - 1) {
    throw Error(ErrorCode::ShapeMismatch, "batch history length differs from the model's");
  }
  nn::LstmState<S> state = encoder_.zero_state(batch.num_agents());
  for (const auto & step : batch.steps) {
    state = encoder_(Tensor<S>(step.template cast<S>()), state);
  }
  return state.h;
}

template <typename S>
Tensor<S> Predictor<S>::social_context(const Batch & batch, bool train) const
{
  const auto graph = build_graph(encode_history(batch), batch.last_positions, batch.slices);
  return social_(graph, batch.target_rows, train);
}

template <typename S>
typename Predictor<S>::MapContext Predictor<S>::encode_map(
  const Batch & batch, bool train, std::mt19937_64 & rng) const
{
  if (config_.variant != Variant::Map) {
    throw Error(ErrorCode::InvalidArgument, "the social variant has no map encoders");
  }
  if (!batch.has_prior) {
    throw Error(ErrorCode::MissingPrior, "the map variant needs a centerline prior");
  }
  if (batch.centerlines.rows() != config_.centerlines * batch.batch_size()) {
    throw Error(ErrorCode::ShapeMismatch, "prior centerline count differs from the model's");
  }
  MapContext ctx;
  ctx.static_ctx = area_encoder_(Tensor<S>(batch.area.template cast<S>()), train, rng);
  ctx.specific_ctx =
    centerline_encoder_(Tensor<S>(batch.centerlines.template cast<S>()), train, rng);
  return ctx;
}

template <typename S>
Tensor<S> Predictor<S>::traffic_context(
  const Batch & batch, bool train, std::mt19937_64 & rng) const
{
  const Index b = batch.batch_size();
  const Tensor<S> social = social_context(batch, train);
  std::vector<Index> scene_rows;
  std::vector<Index> centerline_rows;
  for (int m = 0; m < config_.modes; ++m) {
    for (Index i = 0; i < b; ++i) {
      scene_rows.push_back(i);
      centerline_rows.push_back((m % config_.centerlines) * b + i);
    }
  }
  if (config_.variant == Variant::Social) {
    return nn::gather_rows(social, scene_rows);
  }
  const MapContext map = encode_map(batch, train, rng);
  const Tensor<S> ctx = nn::concat_cols<S>(
    {nn::gather_rows(social, scene_rows), nn::gather_rows(map.static_ctx, scene_rows),
     nn::gather_rows(map.specific_ctx, centerline_rows)});
  return context_projection_(ctx);
}

template <typename S>
DecoderState<S> Predictor<S>::init_decoder(const Batch & batch, const Tensor<S> & h0) const
{
  const Index b = batch.batch_size();
  const Index rows = config_.modes * b;
  const Index w2 = 2 * config_.window;
  if (h0.rows() != rows || h0.cols() != config_.decoder_hidden()) {
    throw Error(ErrorCode::ShapeMismatch, "decoder initial state has the wrong shape");
  }
  if (batch.window != config_.window || batch.pred_len != config_.pred_len) {
    throw Error(ErrorCode::ShapeMismatch, "batch window or horizon differs from the model's");
  }
  DecoderState<S> st;
  nn::Matrix<S> window(rows, w2), positions(rows, w2);
  for (Index r = 0; r < rows; ++r) {
    window.row(r) = batch.target_window.row(r % b).template cast<S>();
    positions.row(r) = batch.target_window_positions.row(r % b).template cast<S>();
  }
  st.position = Tensor<S>(nn::Matrix<S>(positions.rightCols(2)));
  st.window = Tensor<S>(std::move(window));
  st.window_positions = Tensor<S>(std::move(positions));
  st.lstm = {h0, Tensor<S>::zeros(rows, config_.decoder_hidden())};
  if (config_.variant == Variant::Map) {
    if (!batch.has_prior) {
      throw Error(ErrorCode::MissingPrior, "the map variant needs a centerline prior");
    }
    st.centerlines.resize(rows, 2 * config_.pred_len);
    for (int m = 0; m < config_.modes; ++m) {
      for (Index i = 0; i < b; ++i) {
        const Index src = (m % config_.centerlines) * b + i;
        st.centerlines.row(m * b + i) = batch.centerlines.row(src).template cast<S>();
      }
    }
  }
  return st;
}

template <typename S>
void Predictor<S>::decode(DecoderState<S> & st, int steps) const
{
  const int w = config_.window;
  const Index rows = st.position.rows();
  const Index b = rows / config_.modes;
  for (int n = 0; n < steps && st.step < config_.pred_len; ++n) {
    const int t = st.step;
    Tensor<S> embedded = spatial_embedding_(st.window);
    if (config_.variant == Variant::Map) {
      // Slot s of the window sits (w - 1 - s) frames before the current one.
      nn::Matrix<S> aligned(rows, 2 * w);
      for (int s = 0; s < w; ++s) {
        const int idx = std::clamp(t - (w - 1 - s), 0, config_.pred_len - 1);
        aligned.middleCols(2 * s, 2) = st.centerlines.middleCols(2 * idx, 2);
      }
      const Tensor<S> distance = nn::sub(st.window_positions, Tensor<S>(aligned));
      embedded = nn::add(embedded, distance_embedding_(distance));
    }
    const Tensor<S> time(nn::Matrix<S>::Constant(
      rows, 1, static_cast<S>(static_cast<double>(t + 1) / config_.pred_len)));
    st.lstm = decoder_(nn::concat_cols<S>({embedded, time}), st.lstm);
    std::vector<Tensor<S>> per_mode;
    for (int m = 0; m < config_.modes; ++m) {
      per_mode.push_back(heads_[static_cast<std::size_t>(m)](nn::slice_rows(st.lstm.h, m * b, b)));
    }
    const Tensor<S> displacement = nn::concat_rows(per_mode);
    st.position = nn::add(st.position, displacement);
    st.window = nn::concat_cols<S>({nn::slice_cols(st.window, 2, 2 * w - 2), displacement});
    st.window_positions =
      nn::concat_cols<S>({nn::slice_cols(st.window_positions, 2, 2 * w - 2), st.position});
    st.emitted.push_back(st.position);
    ++st.step;
  }
}

template <typename S>
Tensor<S> Predictor<S>::decoded_positions(const DecoderState<S> & st) const
{
  if (st.emitted.empty()) {
    throw Error(ErrorCode::EmptySequence, "the decoder has not run");
  }
  return nn::concat_cols(st.emitted);
}

template <typename S>
Tensor<S> Predictor<S>::confidence(const Tensor<S> & positions) const
{
  const Index b = positions.rows() / config_.modes;
  if (b * config_.modes != positions.rows() || positions.cols() != 2 * config_.pred_len) {
    throw Error(ErrorCode::ShapeMismatch, "confidence head expects mode-major trajectories");
  }
  std::vector<Tensor<S>> modes;
  for (int m = 0; m < config_.modes; ++m) {
    modes.push_back(nn::slice_rows(positions, m * b, b));
  }
  const Tensor<S> x = nn::relu(conf_in_(nn::concat_cols(modes)));
  const Tensor<S> y = nn::relu(nn::add(x, conf_residual_(x)));
  return nn::softmax(conf_out_(y), 1);
}

template <typename S>
ForwardOutput<S> Predictor<S>::forward(const Batch & batch, bool train, std::mt19937_64 & rng) const
{
  DecoderState<S> st = init_decoder(batch, traffic_context(batch, train, rng));
  decode(st, config_.pred_len);
  ForwardOutput<S> out;
  out.positions = decoded_positions(st);
  out.confidences = confidence(out.positions);
  return out;
}

template <typename S>
std::vector<PredictionSet> Predictor<S>::predict(const Batch & batch) const
{
  nn::NoGradGuard no_grad;
  std::mt19937_64 unused_rng(0);
  const ForwardOutput<S> out = forward(batch, false, unused_rng);
  const Index b = batch.batch_size();
  std::vector<PredictionSet> sets(static_cast<std::size_t>(b));
  for (Index i = 0; i < b; ++i) {
    auto & set = sets[static_cast<std::size_t>(i)];
    set.confidences = out.confidences.value().row(i).transpose().template cast<double>();
    for (int m = 0; m < config_.modes; ++m) {
      Polyline traj(config_.pred_len, 2);
      for (int t = 0; t < config_.pred_len; ++t) {
        traj(t, 0) = static_cast<double>(out.positions.value()(m * b + i, 2 * t));
        traj(t, 1) = static_cast<double>(out.positions.value()(m * b + i, 2 * t + 1));
      }
      set.trajectories.push_back(std::move(traj));
    }
  }
  return sets;
}

template class Predictor<float>;
template class Predictor<double>;

namespace
{

std::size_t linear_params(std::size_t in, std::size_t out)
{
  return in * out + out;
}

std::size_t lstm_params(std::size_t in, std::size_t hidden)
{
  return (in + hidden + 1) * 4 * hidden;
}

std::size_t mlp_params(std::size_t in, std::size_t hidden, std::size_t out)
{
  return linear_params(in, hidden) + linear_params(hidden, hidden) + linear_params(hidden, out) +
         4 * hidden;
}

std::uint64_t linear_flops(std::uint64_t rows, std::uint64_t in, std::uint64_t out)
{
  return rows * in * out;
}

std::uint64_t lstm_flops(std::uint64_t rows, std::uint64_t in, std::uint64_t hidden)
{
  return rows * (in + hidden) * 4 * hidden + rows * 5 * hidden;
}

std::uint64_t mlp_flops(std::uint64_t rows, std::uint64_t in, std::uint64_t hidden, std::uint64_t out)
{
  return linear_flops(rows, in, hidden) + linear_flops(rows, hidden, hidden) +
         linear_flops(rows, hidden, out) + 4 * rows * hidden;
}

}  // namespace

std::size_t count_params(const ModelConfig & c)
{
  c.validate();
  const std::size_t hs = static_cast<std::size_t>(c.h_social);
  const std::size_t hd = static_cast<std::size_t>(c.decoder_hidden());
  const std::size_t w2 = 2 * static_cast<std::size_t>(c.window);
  const std::size_t gcn = static_cast<std::size_t>(c.gcn_layers);
  std::size_t total = lstm_params(2, hs);
  total += gcn * 2 * linear_params(2 * hs + 2, hs) + (gcn - 1) * 2 * hs;
  total += 4 * linear_params(hs, hs);
  if (c.variant == Variant::Map) {
    const std::size_t hm = static_cast<std::size_t>(c.h_map);
    total += mlp_params(2 * static_cast<std::size_t>(c.plausible_points), hm, hm);
    total += mlp_params(2 * static_cast<std::size_t>(c.pred_len), hm, hm);
    total += linear_params(static_cast<std::size_t>(c.context_width()), hd);
    total += linear_params(w2, w2);
  }
  total += linear_params(w2, w2) + lstm_params(w2 + 1, hd);
  total += static_cast<std::size_t>(c.modes) * linear_params(hd, 2);
  const std::size_t ch = static_cast<std::size_t>(c.confidence_hidden);
  total += linear_params(static_cast<std::size_t>(c.modes * 2 * c.pred_len), ch) +
           linear_params(ch, ch) + linear_params(ch, static_cast<std::size_t>(c.modes));
  return total;
}

std::uint64_t count_flops(const ModelConfig & c, int agents)
{
  c.validate();
  if (agents < 1) {
    throw Error(ErrorCode::InvalidArgument, "agent count must be >= 1");
  }
  const std::uint64_t n = static_cast<std::uint64_t>(agents);
  const std::uint64_t hs = static_cast<std::uint64_t>(c.h_social);
  const std::uint64_t hd = static_cast<std::uint64_t>(c.decoder_hidden());
  const std::uint64_t w2 = 2 * static_cast<std::uint64_t>(c.window);
  const std::uint64_t k = static_cast<std::uint64_t>(c.modes);
  const std::uint64_t d = hs / static_cast<std::uint64_t>(c.heads);
  const std::uint64_t pairs = n * (n - 1);

  std::uint64_t total = static_cast<std::uint64_t>(c.obs_len - 1) * lstm_flops(n, 2, hs);
  const std::uint64_t gcn = static_cast<std::uint64_t>(c.gcn_layers);
  total += gcn * (2 * linear_flops(pairs, 2 * hs + 2, hs) + 2 * pairs * hs);
  total += (gcn - 1) * 2 * n * hs;
  total += 4 * linear_flops(n, hs, hs);
  total += static_cast<std::uint64_t>(c.heads) * (2 * n * n * d + n * n);

  std::uint64_t step = linear_flops(k, w2, w2) + lstm_flops(k, w2 + 1, hd) + k * linear_flops(1, hd, 2);
  if (c.variant == Variant::Map) {
    const std::uint64_t hm = static_cast<std::uint64_t>(c.h_map);
    const std::uint64_t m = static_cast<std::uint64_t>(c.centerlines);
    total += mlp_flops(1, 2 * static_cast<std::uint64_t>(c.plausible_points), hm, hm);
    total += mlp_flops(m, 2 * static_cast<std::uint64_t>(c.pred_len), hm, hm);
    total += linear_flops(k, static_cast<std::uint64_t>(c.context_width()), hd);
    step += linear_flops(k, w2, w2);
  }
  total += static_cast<std::uint64_t>(c.pred_len) * step;

  const std::uint64_t ch = static_cast<std::uint64_t>(c.confidence_hidden);
  total += linear_flops(1, k * 2 * static_cast<std::uint64_t>(c.pred_len), ch) + ch;
  total += linear_flops(1, ch, ch) + ch + linear_flops(1, ch, k) + k;
  return total;
}

}  // namespace trajkit
