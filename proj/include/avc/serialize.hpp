// Copyright 2026 The avc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "avc/tensor.hpp"

namespace avc {

// Raw record of the on-disk tensor format: "AVCT", u32 version (1), u32 ndim,
// u64 dims, float32 payload, all little-endian, row-major.
struct StoredTensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;
};

using Checkpoint = std::vector<std::pair<std::string, StoredTensor>>;

void write_tensor(std::ostream& os, const StoredTensor& t);
StoredTensor read_tensor(std::istream& is);

void save_tensor(const std::filesystem::path& path, const StoredTensor& t);
StoredTensor load_tensor(const std::filesystem::path& path);

// "AVCK" followed by (u32 name length, UTF-8 name, tensor) records until EOF.
void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

template <typename Scalar>
StoredTensor to_stored(const Tensor<Scalar>& t) {
  StoredTensor s;
  for (Index d : t.shape()) s.dims.push_back(static_cast<std::uint64_t>(d));
  s.data.resize(static_cast<std::size_t>(t.numel()));
  for (Index i = 0; i < t.numel(); ++i) s.data[static_cast<std::size_t>(i)] = static_cast<float>(t.value()[i]);
  return s;
}

template <typename Scalar>
Tensor<Scalar> from_stored(const StoredTensor& s, bool requires_grad = false) {
  Shape shape;
  for (auto d : s.dims) shape.push_back(static_cast<Index>(d));
  Vec<Scalar> v(static_cast<Index>(s.data.size()));
  for (std::size_t i = 0; i < s.data.size(); ++i) v[static_cast<Index>(i)] = static_cast<Scalar>(s.data[i]);
  return Tensor<Scalar>(std::move(shape), std::move(v), requires_grad);
}

}  // namespace avc
