// core/src/container.cpp

// Copyright 2026  The mvae Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "container.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mvae/error.hpp"

namespace mvae::internal {

namespace {

std::size_t NumElements(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

}  // namespace

void WriteContainer(const std::filesystem::path& path, const Container& c) {
  nlohmann::json manifest = c.manifest;
  manifest["version"] = kContainerVersion;
  nlohmann::json list = nlohmann::json::array();
  for (const Tensor& t : c.tensors) {
    if (NumElements(t.shape) != t.values.size()) {
      throw ConfigError("tensor " + t.name + " has " + std::to_string(t.values.size()) +
                        " values but its shape implies " + std::to_string(NumElements(t.shape)));
    }
    list.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  manifest["tensors"] = list;
  const std::string header = manifest.dump();

  std::vector<unsigned char> out(kContainerMagic, kContainerMagic + 8);
  const auto header_len = static_cast<std::uint32_t>(header.size());
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>((header_len >> (8 * k)) & 0xFF));
  out.insert(out.end(), header.begin(), header.end());
  for (const Tensor& t : c.tensors) {
    for (float v : t.values) {
      const auto bits = std::bit_cast<std::uint32_t>(v);
      for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>((bits >> (8 * k)) & 0xFF));
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

Container ReadContainer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string where = " (" + path.string() + ")";
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kContainerMagic, 8) != 0) {
    throw FormatError("bad magic: not an mvae container" + where);
  }
  std::uint32_t header_len = 0;
  for (int k = 0; k < 4; ++k) header_len |= static_cast<std::uint32_t>(bytes[8 + k]) << (8 * k);
  if (12 + static_cast<std::size_t>(header_len) > bytes.size()) {
    throw FormatError("truncated manifest" + where);
  }

  Container c;
  try {
    c.manifest = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what() + where);
  }
  if (!c.manifest.is_object() || !c.manifest.contains("version") ||
      !c.manifest["version"].is_number_integer()) {
    throw FormatError("manifest lacks an integer version" + where);
  }
  if (c.manifest["version"].get<int>() != kContainerVersion) {
    throw FormatError("unsupported container version " + c.manifest["version"].dump() + where);
  }
  if (!c.manifest.contains("tensors") || !c.manifest["tensors"].is_array()) {
    throw FormatError("manifest lacks a tensor list" + where);
  }

  std::size_t offset = 12 + header_len;
  try {
    for (const auto& entry : c.manifest["tensors"]) {
      Tensor t;
      t.name = entry.at("name").get<std::string>();
      t.shape = entry.at("shape").get<std::vector<std::size_t>>();
      const std::size_t n = NumElements(t.shape);
      if (offset + 4 * n > bytes.size()) {
        throw FormatError("truncated payload while reading tensor " + t.name + where);
      }
      t.values.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const unsigned char* p = bytes.data() + offset + 4 * k;
        const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                                   (static_cast<std::uint32_t>(p[1]) << 8) |
                                   (static_cast<std::uint32_t>(p[2]) << 16) |
                                   (static_cast<std::uint32_t>(p[3]) << 24);
        t.values[k] = std::bit_cast<float>(bits);
        if (!std::isfinite(t.values[k])) {
          throw FormatError("non-finite entry in tensor " + t.name + where);
        }
      }
      offset += 4 * n;
      c.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tensor list: ") + e.what() + where);
  }
  if (offset != bytes.size()) {
    throw FormatError(std::to_string(bytes.size() - offset) + " trailing bytes after payload" + where);
  }
  c.manifest.erase("tensors");
  return c;
}

}  // namespace mvae::internal
