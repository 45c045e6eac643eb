// Copyright 2026 The FairSkin Desk Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fairskin/numerics/errors.hpp"
#include "fairskin/numerics/linalg.hpp"

namespace fairskin {

/// Checkpoint framing shared by all models:
///   magic "FSKN" | u32 version | u32 kind | u32 n_config | n_config x i64 |
///   u64 n_params | n_params x f64 | u64 n_aux | n_aux x f64
/// All integers and reals little-endian. `aux` holds fixed, non-trained state.
struct CheckpointBlob {
  static constexpr std::uint32_t kVersion = 1;
  std::uint32_t kind = 0;
  std::vector<std::int64_t> config;
  Vector params;
  Vector aux;
};

namespace detail {

template <typename T>
void PutLe(std::ostream& out, T v) {
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T GetLe(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw PreconditionError("checkpoint: truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

}  // namespace detail

inline void WriteCheckpoint(const std::filesystem::path& path, const CheckpointBlob& blob) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write checkpoint " + path.string());
  out.write("FSKN", 4);
  detail::PutLe<std::uint32_t>(out, CheckpointBlob::kVersion);
  detail::PutLe<std::uint32_t>(out, blob.kind);
  detail::PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(blob.config.size()));
  for (auto v : blob.config) detail::PutLe<std::int64_t>(out, v);
  detail::PutLe<std::uint64_t>(out, static_cast<std::uint64_t>(blob.params.size()));
  for (Eigen::Index i = 0; i < blob.params.size(); ++i) detail::PutLe<double>(out, blob.params(i));
  detail::PutLe<std::uint64_t>(out, static_cast<std::uint64_t>(blob.aux.size()));
  for (Eigen::Index i = 0; i < blob.aux.size(); ++i) detail::PutLe<double>(out, blob.aux(i));
  if (!out) throw PreconditionError("failed writing checkpoint " + path.string());
}

inline CheckpointBlob ReadCheckpoint(const std::filesystem::path& path, std::uint32_t expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FSKN", 4) != 0) throw PreconditionError("checkpoint: bad magic");
  if (detail::GetLe<std::uint32_t>(in) != CheckpointBlob::kVersion) throw PreconditionError("checkpoint: unsupported version");
  CheckpointBlob blob;
  blob.kind = detail::GetLe<std::uint32_t>(in);
  if (blob.kind != expected_kind) throw PreconditionError("checkpoint: wrong model kind");
  const auto n_config = detail::GetLe<std::uint32_t>(in);
  if (n_config > 64) throw PreconditionError("checkpoint: corrupt header");
  for (std::uint32_t i = 0; i < n_config; ++i) blob.config.push_back(detail::GetLe<std::int64_t>(in));
  auto read_reals = [&](Vector& v) {
    const auto n = detail::GetLe<std::uint64_t>(in);
    if (n > (1ULL << 32)) throw PreconditionError("checkpoint: corrupt array length");
    v.resize(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = detail::GetLe<double>(in);
  };
  read_reals(blob.params);
  read_reals(blob.aux);
  if (in.peek() != std::char_traits<char>::eof()) throw PreconditionError("checkpoint: trailing bytes");
  return blob;
}

}  // namespace fairskin
