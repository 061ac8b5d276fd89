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
// Basis persistence. Layout (little-endian):
//
//   bytes 0..4   magic "MABS1"
//   uint32       L, N
//   uint8        model tag (0=block-fading, 1=bwl, 2=dft, 3=pca)
//   L*N x        (float32 re, float32 im), column-major

#include <cstdint>
#include <fstream>
#include <vector>

#include "mach/basis.hpp"
#include "mach/errors.hpp"

namespace mach {

namespace {
constexpr char kMagic[5] = {'M', 'A', 'B', 'S', '1'};

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

std::string default_label(BasisModel model) {
  switch (model) {
    case BasisModel::kBlockFading:
      return "block-fading";
    case BasisModel::kBwl:
      return "bwl";
    case BasisModel::kDft:
      return "dft";
    case BasisModel::kPca:
      return "pca";
  }
  return "unknown";
}
}  // namespace

void write_basis(const std::string& filename, const Basis& basis) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) throw ConfigError(filename, "cannot open for writing");

  out.write(kMagic, 5);
  write_u32(out, static_cast<std::uint32_t>(basis.L()));
  write_u32(out, static_cast<std::uint32_t>(basis.order()));
  const char tag = static_cast<char>(basis.model);
  out.write(&tag, 1);

  const long n = basis.G.size();
  std::vector<float> buf(static_cast<std::size_t>(2 * n));
  const std::complex<double>* data = basis.G.data();
  for (long i = 0; i < n; ++i) {
    buf[static_cast<std::size_t>(2 * i)] = static_cast<float>(data[i].real());
    buf[static_cast<std::size_t>(2 * i + 1)] = static_cast<float>(data[i].imag());
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw ConfigError(filename, "write failed");
}

Basis read_basis(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw ConfigError(filename, "cannot open basis file");

  char magic[5];
  if (!in.read(magic, 5) || !std::equal(magic, magic + 5, kMagic)) {
    throw ConfigError(filename, "bad magic, not a MABS1 basis file");
  }
  const std::uint32_t L = read_u32(in, filename);
  const std::uint32_t N = read_u32(in, filename);
  if (L == 0 || N == 0) throw ConfigError(filename, "zero dimension in header");

  char tag;
  if (!in.read(&tag, 1)) throw ConfigError(filename, "truncated header");
  if (tag < 0 || tag > 3) {
    throw ConfigError(filename, "unknown model tag " + std::to_string(static_cast<int>(tag)));
  }

  Basis basis;
  basis.model = static_cast<BasisModel>(tag);
  basis.label = default_label(basis.model);
  basis.G.resize(L, N);

  const long n = basis.G.size();
  std::vector<float> buf(static_cast<std::size_t>(2 * n));
  if (!in.read(reinterpret_cast<char*>(buf.data()),
               static_cast<std::streamsize>(buf.size() * sizeof(float)))) {
    throw ConfigError(filename, "truncated payload");
  }
  std::complex<double>* data = basis.G.data();
  for (long i = 0; i < n; ++i) {
    data[i] = {static_cast<double>(buf[static_cast<std::size_t>(2 * i)]),
               static_cast<double>(buf[static_cast<std::size_t>(2 * i + 1)])};
  }
  return basis;
}

}  // namespace mach
