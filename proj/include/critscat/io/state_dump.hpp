#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "critscat/evolution/reduced.hpp"
#include "critscat/io/format.hpp"

namespace critscat::io {

/*
 * Layout, all little-endian:
 *   char[8]  "CRSCSTAT"
 *   u32 version, u32 dimension, u32 bytes per complex value (8 or 16), u32 side (0 pos, 1 mom)
 *   u64 points, f64 spacing
 *   f64 tau, f64 tau_from, f64 error_estimate, f64 norm_drift, f64 dtau_used, u64 steps
 *   points complex values (re, im)
 */
inline constexpr std::array<char, 8> kStateMagic{'C', 'R', 'S', 'C', 'S', 'T', 'A', 'T'};
inline constexpr std::uint32_t kStateVersion = 1;

struct StateRecord {
  EvolutionState state;
  double tau_from = 0.0;
};

namespace detail {

template <class T>
void put(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T> && (sizeof(T) == 4 || sizeof(T) == 8));
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  auto u = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(T); ++i, u >>= 8) out += static_cast<char>(u & 0xff);
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  require(pos + sizeof(T) <= in.size(), ErrorCode::IoError, "state dump truncated");
  U u = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    u |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  return std::bit_cast<T>(u);
}

}  // namespace detail

/// precision_bytes 16 keeps every bit (complex128); 8 stores complex64 for debugging.
inline std::string encode_state(const StateRecord& r, std::uint32_t precision_bytes = 16) {
  require(precision_bytes == 8 || precision_bytes == 16, ErrorCode::InvalidArgument,
          "precision must be 8 or 16 bytes");
  const auto& s = r.state.state;
  std::string out(kStateMagic.begin(), kStateMagic.end());
  using detail::put;
  put<std::uint32_t>(out, kStateVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.grid.dimension));
  put<std::uint32_t>(out, precision_bytes);
  put<std::uint32_t>(out, s.side == Side::position ? 0u : 1u);
  put<std::uint64_t>(out, s.grid.points);
  put<double>(out, s.grid.spacing());
  put<double>(out, r.state.tau);
  put<double>(out, r.tau_from);
  put<double>(out, r.state.error_estimate);
  put<double>(out, r.state.norm_drift);
  put<double>(out, r.state.dtau_used);
  put<std::uint64_t>(out, r.state.steps_taken);
  out.reserve(out.size() + s.values.size() * precision_bytes);
  for (const auto& v : s.values) {
    if (precision_bytes == 16) {
      put<double>(out, v.real());
      put<double>(out, v.imag());
    } else {
      put<float>(out, static_cast<float>(v.real()));
      put<float>(out, static_cast<float>(v.imag()));
    }
  }
  return out;
}

inline StateRecord decode_state(const std::string& in) {
  using detail::get;
  require(in.size() >= kStateMagic.size() && std::memcmp(in.data(), kStateMagic.data(), 8) == 0,
          ErrorCode::IoError, "not a state dump (bad magic)");
  std::size_t pos = 8;
  const auto version = get<std::uint32_t>(in, pos);
  require(version == kStateVersion, ErrorCode::IoError, "unsupported state dump version");
  const auto dim = get<std::uint32_t>(in, pos);
  const auto bytes = get<std::uint32_t>(in, pos);
  require(bytes == 8 || bytes == 16, ErrorCode::IoError, "bad element size in state dump");
  const auto side = get<std::uint32_t>(in, pos);
  const auto points = get<std::uint64_t>(in, pos);
  const auto spacing = get<double>(in, pos);
  StateRecord r;
  r.state.tau = get<double>(in, pos);
  r.tau_from = get<double>(in, pos);
  r.state.error_estimate = get<double>(in, pos);
  r.state.norm_drift = get<double>(in, pos);
  r.state.dtau_used = get<double>(in, pos);
  r.state.steps_taken = get<std::uint64_t>(in, pos);
  require(in.size() - pos == points * bytes, ErrorCode::IoError, "state dump size mismatch");
  // spacing = 2L/N with N a power of two, so L is recovered exactly
  GridSpec g(0.5 * spacing * static_cast<double>(points), points, static_cast<int>(dim));
  CVector v(points);
  for (auto& z : v) {
    if (bytes == 16) {
      const double re = get<double>(in, pos);
      z = {re, get<double>(in, pos)};
    } else {
      const float re = get<float>(in, pos);
      z = {re, get<float>(in, pos)};
    }
  }
  r.state.state = SpectralState(g, std::move(v), side == 0 ? Side::position : Side::momentum);
  return r;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::IoError, "cannot open " + p.string());
  return {std::istreambuf_iterator<char>(f), {}};
}

inline void write_state(const std::filesystem::path& p, const StateRecord& r, std::uint32_t precision_bytes = 16) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorCode::IoError, "cannot write " + p.string());
  const auto bytes = encode_state(r, precision_bytes);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(f.flush()), ErrorCode::IoError, "write failed: " + p.string());
}

inline StateRecord read_state(const std::filesystem::path& p) { return decode_state(read_file(p)); }

}  // namespace critscat::io
