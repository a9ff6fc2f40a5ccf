// core/src/container.hpp

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

#ifndef MVAE_SRC_CONTAINER_HPP_
#define MVAE_SRC_CONTAINER_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mvae::internal {

// Binary layout, all integers little-endian:
//   8 bytes   magic "MVAEPACK"
//   4 bytes   uint32 length of the JSON manifest in bytes
//   manifest  UTF-8 JSON object; manifest["tensors"] lists {name, shape}
//   payload   float32 tensors in manifest order, row-major
inline constexpr char kContainerMagic[8] = {'M', 'V', 'A', 'E', 'P', 'A', 'C', 'K'};
inline constexpr int kContainerVersion = 1;

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

struct Container {
  nlohmann::json manifest;  // without the "tensors" key
  std::vector<Tensor> tensors;
};

// Adds "version" and "tensors" to the manifest before writing.
void WriteContainer(const std::filesystem::path& path, const Container& c);

// Checks magic, version, manifest syntax, exact payload size and finiteness.
Container ReadContainer(const std::filesystem::path& path);

}  // namespace mvae::internal

#endif  // MVAE_SRC_CONTAINER_HPP_
