// SPDX-License-Identifier: Apache-2.0
// ------------------------------------------------------------------------
// mach — low-rank multipath channel models and covariance-based activity
// detection over OFDM time-frequency blocks.
//
// Copyright 2026 the mach authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Channel tensor persistence. Layout (little-endian):
//
//   bytes 0..4   magic "MACH1"
//   uint32       L, K, M
//   L*K*M x      (float32 re, float32 im), l fastest, then k, then m
//
// The in-memory column-major L x (K*M) layout with column k + K*m matches
// the file order exactly, so the payload is written in one pass.

#include <cstdint>
#include <fstream>
#include <vector>

#include "mach/channel_sim.hpp"
#include "mach/errors.hpp"

namespace mach {

namespace {
constexpr char kMagic[5] = {'M', 'A', 'C', 'H', '1'};

void write_u32(std::ofstream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& filename) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ConfigError(filename, "truncated header");
  }
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}
}  // namespace

void write_channel_tensor(const std::string& filename, const ChannelTensor& tensor) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw ConfigError(filename, "cannot open for writing");

  out.write(kMagic, 5);
  write_u32(out, static_cast<std::uint32_t>(tensor.L()));
  write_u32(out, static_cast<std::uint32_t>(tensor.K));
  write_u32(out, static_cast<std::uint32_t>(tensor.M));

  const long n = tensor.h.size();
  std::vector<float> buf(static_cast<std::size_t>(2 * n));
  const std::complex<double>* data = tensor.h.data();
  for (long i = 0; i < n; ++i) {
    buf[static_cast<std::size_t>(2 * i)] = static_cast<float>(data[i].real());
    buf[static_cast<std::size_t>(2 * i + 1)] = static_cast<float>(data[i].imag());
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw ConfigError(filename, "write failed");
}

ChannelTensor read_channel_tensor(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw ConfigError(filename, "cannot open channel tensor file");

  char magic[5];
  if (!in.read(magic, 5) || !std::equal(magic, magic + 5, kMagic)) {
    throw ConfigError(filename, "bad magic, not a MACH1 channel tensor");
  }
  const std::uint32_t L = read_u32(in, filename);
  const std::uint32_t K = read_u32(in, filename);
  const std::uint32_t M = read_u32(in, filename);
  if (L == 0 || K == 0 || M == 0) throw ConfigError(filename, "zero dimension in header");

  ChannelTensor tensor;
  tensor.K = static_cast<int>(K);
  tensor.M = static_cast<int>(M);
  tensor.h.resize(L, static_cast<long>(K) * M);

  const long n = tensor.h.size();
  std::vector<float> buf(static_cast<std::size_t>(2 * n));
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ConfigError(filename, "truncated payload");
  }
  std::complex<double>* data = tensor.h.data();
  for (long i = 0; i < n; ++i) {
    data[i] = {static_cast<double>(buf[static_cast<std::size_t>(2 * i)]),
               static_cast<double>(buf[static_cast<std::size_t>(2 * i + 1)])};
  }
  return tensor;
}

}  // namespace mach
