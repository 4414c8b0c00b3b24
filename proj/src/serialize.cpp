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

#include "avc/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "avc/errors.hpp"

namespace avc {
namespace {

static_assert(std::endian::native == std::endian::little, "serialization assumes a little-endian host");

constexpr char kTensorMagic[4] = {'A', 'V', 'C', 'T'};
constexpr char kCheckpointMagic[4] = {'A', 'V', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError(std::string("truncated stream while reading ") + what);
  }
  return v;
}

void expect_magic(std::istream& is, const char (&magic)[4]) {
  char buf[4];
  if (!is.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("bad magic, expected \"") + std::string(magic, 4) + "\"");
  }
}

}  // namespace

void write_tensor(std::ostream& os, const StoredTensor& t) {
  std::uint64_t n = 1;
  for (auto d : t.dims) n *= d;
  if (n != t.data.size()) throw DimensionError("write_tensor: payload does not match dims");
  os.write(kTensorMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put<std::uint64_t>(os, d);
  os.write(reinterpret_cast<const char*>(t.data.data()),
           static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  if (!os) throw IoError("write_tensor: stream write failed");
}

StoredTensor read_tensor(std::istream& is) {
  expect_magic(is, kTensorMagic);
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kVersion) throw FormatError("unsupported tensor version " + std::to_string(version));
  const auto ndim = get<std::uint32_t>(is, "ndim");
  if (ndim > 16) throw FormatError("implausible tensor rank " + std::to_string(ndim));
  StoredTensor t;
  std::uint64_t n = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    const auto d = get<std::uint64_t>(is, "dims");
    if (d == 0 || d > (1ULL << 32)) throw FormatError("invalid tensor dim " + std::to_string(d));
    t.dims.push_back(d);
    n *= d;
  }
  if (n > (1ULL << 31)) throw FormatError("tensor too large");
  t.data.resize(n);
  if (!is.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(n * sizeof(float)))) {
    throw FormatError("truncated tensor payload");
  }
  return t;
}

void save_tensor(const std::filesystem::path& path, const StoredTensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_tensor(os, t);
}

StoredTensor load_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_tensor(is);
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt) {
  os.write(kCheckpointMagic, 4);
  for (const auto& [name, tensor] : ckpt) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_tensor(os, tensor);
  }
  if (!os) throw IoError("write_checkpoint: stream write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
  expect_magic(is, kCheckpointMagic);
  Checkpoint ckpt;
  while (is.peek() != std::char_traits<char>::eof()) {
    const auto len = get<std::uint32_t>(is, "name length");
    if (len > 4096) throw FormatError("implausible tensor name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError("truncated tensor name");
    ckpt.emplace_back(std::move(name), read_tensor(is));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  return read_checkpoint(is);
}

}  // namespace avc
