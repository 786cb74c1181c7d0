// Copyright 2026 The Infoseek Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "infoseek/checkpoint.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "infoseek/errors.hpp"

namespace infoseek {
namespace {

constexpr const char* kFormatName = "infoseek-checkpoint";
constexpr int kFormatVersion = 1;

void write_le(std::ostream& out, double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double read_le(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    throw LoadError("checkpoint: truncated array payload");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_checkpoint(std::ostream& out, const Vocabulary& vocab, const Parameters& params) {
  params.check_shapes();
  if (params.vocab_size() != vocab.size()) {
    throw ConfigError("checkpoint: vocabulary size does not match parameters");
  }
  nlohmann::json header;
  header["format"] = kFormatName;
  header["version"] = kFormatVersion;
  header["byte_order"] = "little";
  header["scalar"] = "float64";
  header["layout"] = "column_major";
  header["vocab_size"] = params.vocab_size();
  header["embed_dim"] = params.embed_dim();
  header["hidden_dim"] = params.hidden_dim();
  header["tokens"] = vocab.tokens();
  nlohmann::json arrays = nlohmann::json::array();
  params.visit([&](std::string_view name, const auto& a) {
    arrays.push_back({{"name", name}, {"rows", a.rows()}, {"cols", a.cols()}});
  });
  header["arrays"] = arrays;
  out << header.dump() << '\n';
  params.visit([&](std::string_view, const auto& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) write_le(out, a.data()[i]);
  });
  if (!out) throw LoadError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError("checkpoint: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("checkpoint: malformed header: ") + e.what());
  }
  try {
    if (header.at("format") != kFormatName || header.at("version") != kFormatVersion) {
      throw LoadError("checkpoint: unsupported format or version");
    }
    Vocabulary vocab(header.at("tokens").get<std::vector<std::string>>());
    const auto v = header.at("vocab_size").get<Eigen::Index>();
    const auto e = header.at("embed_dim").get<Eigen::Index>();
    const auto h = header.at("hidden_dim").get<Eigen::Index>();
    if (v != vocab.size()) throw LoadError("checkpoint: token list does not match vocab_size");
    Parameters params = Parameters::zeros(v, e, h);
    const auto& arrays = header.at("arrays");
    std::size_t k = 0;
    params.visit([&](std::string_view name, auto& a) {
      if (k >= arrays.size()) throw LoadError("checkpoint: missing array entries");
      const auto& meta = arrays[k++];
      if (meta.at("name") != name || meta.at("rows").get<Eigen::Index>() != a.rows() ||
          meta.at("cols").get<Eigen::Index>() != a.cols()) {
        throw LoadError("checkpoint: array '" + std::string(name) + "' has unexpected shape");
      }
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = read_le(in);
    });
    if (!params.all_finite()) throw LoadError("checkpoint: non-finite parameter values");
    return Checkpoint{std::move(vocab), std::move(params)};
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("checkpoint: bad header field: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab,
                     const Parameters& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("checkpoint: cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, vocab, params);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("checkpoint: cannot open '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace infoseek
