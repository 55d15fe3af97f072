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

#include "trajkit/nn/checkpoint.hpp"

#include "trajkit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>
#include <vector>

namespace trajkit::nn
{
namespace
{

using nlohmann::json;

template <typename S>
constexpr const char * dtype_name()
{
  return std::is_same_v<S, float> ? "float32" : "float64";
}

template <typename T>
T to_little_endian(T v)
{
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(std::begin(bytes), std::end(bytes));
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

json read_manifest(const std::filesystem::path & manifest)
{
  std::ifstream in(manifest);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open checkpoint manifest " + manifest.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, "checkpoint manifest: " + std::string(e.what()));
  }
}

template <typename Stored, typename S>
void read_values(const std::vector<char> & bytes, std::size_t offset, Matrix<S> & dst)
{
  for (Index i = 0; i < dst.size(); ++i) {
    Stored v;
    std::memcpy(&v, bytes.data() + offset + static_cast<std::size_t>(i) * sizeof(Stored), sizeof(Stored));
    dst.data()[i] = static_cast<S>(to_little_endian(v));
  }
}

}  // namespace

std::filesystem::path checkpoint_data_path(const std::filesystem::path & manifest)
{
  std::filesystem::path data = manifest;
  data.replace_extension(".bin");
  return data;
}

template <typename S>
void save_checkpoint(
  const ParameterSet<S> & params, const std::filesystem::path & manifest,
  const std::string & metadata_json)
{
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["dtype"] = dtype_name<S>();
  const auto data_path = checkpoint_data_path(manifest);
  doc["data_file"] = data_path.filename().string();
  json entries = json::array();
  std::vector<char> bytes;
  for (const auto & e : params.entries()) {
    entries.push_back(
      {{"name", e.name},
       {"shape", {e.tensor.rows(), e.tensor.cols()}},
       {"kind", e.kind == EntryKind::Parameter ? "parameter" : "buffer"}});
    const auto & v = e.tensor.value();
    for (Index i = 0; i < v.size(); ++i) {
      const S le = to_little_endian(v.data()[i]);
      const char * raw = reinterpret_cast<const char *>(&le);
      bytes.insert(bytes.end(), raw, raw + sizeof(S));
    }
  }
  doc["entries"] = std::move(entries);
  doc["total_bytes"] = bytes.size();
  try {
    doc["metadata"] = json::parse(metadata_json);
  } catch (const json::exception & e) {
    throw Error(ErrorCode::InvalidArgument, "checkpoint metadata: " + std::string(e.what()));
  }

  std::ofstream data(data_path, std::ios::binary);
  data.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::ofstream out(manifest);
  out << doc.dump(2) << '\n';
  if (!data || !out) {
    throw Error(ErrorCode::IoError, "cannot write checkpoint " + manifest.string());
  }
}

std::string read_checkpoint_metadata(const std::filesystem::path & manifest)
{
  const json doc = read_manifest(manifest);
  return doc.contains("metadata") ? doc["metadata"].dump() : "{}";
}

template <typename S>
void load_checkpoint(ParameterSet<S> & params, const std::filesystem::path & manifest)
{
  const json doc = read_manifest(manifest);
  try {
    if (doc.at("format_version").get<int>() != kCheckpointFormatVersion) {
      throw Error(ErrorCode::MalformedInput, "unsupported checkpoint format version");
    }
    const std::string dtype = doc.at("dtype").get<std::string>();
    if (dtype != "float32" && dtype != "float64") {
      throw Error(ErrorCode::MalformedInput, "unknown checkpoint dtype " + dtype);
    }
    const std::size_t width = dtype == "float32" ? 4 : 8;
    const auto & entries = doc.at("entries");
    if (entries.size() != params.entries().size()) {
      throw Error(ErrorCode::ShapeMismatch, "checkpoint entry count differs from the model");
    }
    std::size_t expected = 0;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto & e = params.entries()[k];
      const auto shape = entries[k].at("shape").get<std::vector<Index>>();
      if (entries[k].at("name").get<std::string>() != e.name || shape.size() != 2 ||
          shape[0] != e.tensor.rows() || shape[1] != e.tensor.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "checkpoint entry mismatch at '" + e.name + "'");
      }
      expected += static_cast<std::size_t>(shape[0] * shape[1]) * width;
    }
    const auto data_path = manifest.parent_path() / doc.at("data_file").get<std::string>();
    std::ifstream in(data_path, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::IoError, "cannot open checkpoint data " + data_path.string());
    }
    const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected || doc.at("total_bytes").get<std::size_t>() != expected) {
      throw Error(
        ErrorCode::MalformedInput, "checkpoint data holds " + std::to_string(bytes.size()) +
                                     " bytes, expected " + std::to_string(expected));
    }
    std::size_t offset = 0;
    for (const auto & e : params.entries()) {
      Tensor<S> t = e.tensor;
      auto & dst = t.mutable_value();
      if (width == 4) {
        read_values<float>(bytes, offset, dst);
      } else {
        read_values<double>(bytes, offset, dst);
      }
      offset += static_cast<std::size_t>(dst.size()) * width;
    }
  } catch (const json::exception & e) {
    throw Error(ErrorCode::MalformedInput, "checkpoint manifest: " + std::string(e.what()));
  }
}

template void save_checkpoint(const ParameterSet<float> &, const std::filesystem::path &, const std::string &);
template void save_checkpoint(const ParameterSet<double> &, const std::filesystem::path &, const std::string &);
template void load_checkpoint(ParameterSet<float> &, const std::filesystem::path &);
template void load_checkpoint(ParameterSet<double> &, const std::filesystem::path &);

}  // namespace trajkit::nn
