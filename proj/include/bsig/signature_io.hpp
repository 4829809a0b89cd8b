#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/signature.hpp"

namespace bsig {

// BSG1 layout, little-endian:
//   "BSG1" | u32 version=1 | u64 N | u64 n | u8 hop | u8 kind | u64 seed
//   then N records of ceil(n/8) bytes; bit j of a record is bit j%8 of byte j/8.

inline constexpr std::array<char, 4> kSignatureMagic{'B', 'S', 'G', '1'};
inline constexpr std::uint32_t kSignatureFormatVersion = 1;

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  out.write(buf, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) throw error(errc::bad_format, "truncated signature header");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace detail

inline void write_signatures(std::ostream& out, const signature_set& sigs) {
  const auto& fp = sigs.fingerprint();
  out.write(kSignatureMagic.data(), kSignatureMagic.size());
  detail::put_le<std::uint32_t>(out, kSignatureFormatVersion);
  detail::put_le<std::uint64_t>(out, sigs.node_count());
  detail::put_le<std::uint64_t>(out, sigs.size());
  detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(sigs.hop()));
  detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(fp.kind));
  detail::put_le<std::uint64_t>(out, fp.seed);

  const std::size_t record_bytes = static_cast<std::size_t>((sigs.size() + 7) / 8);
  std::vector<char> record(record_bytes);
  for (node_id u = 0; u < sigs.node_count(); ++u) {
    const auto words = sigs[u].words();
    for (std::size_t b = 0; b < record_bytes; ++b) record[b] = static_cast<char>((words[b / 8] >> (8 * (b % 8))) & 0xff);
    out.write(record.data(), static_cast<std::streamsize>(record_bytes));
  }
  if (!out) throw error(errc::io_error, "failed writing signature stream");
}

inline signature_set read_signatures(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kSignatureMagic)
    throw error(errc::bad_format, "not a BSG1 signature file (bad magic)");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != kSignatureFormatVersion)
    throw error(errc::bad_format, "unsupported BSG1 format version " + std::to_string(version));
  const auto node_count = detail::get_le<std::uint64_t>(in);
  const auto n = detail::get_le<std::uint64_t>(in);
  const auto hop = detail::get_le<std::uint8_t>(in);
  const auto kind = detail::get_le<std::uint8_t>(in);
  const auto seed = detail::get_le<std::uint64_t>(in);
  if (n == 0) throw error(errc::bad_format, "signature length must be >= 1");
  if (node_count > std::numeric_limits<node_id>::max() || n > (std::uint64_t{1} << 40))
    throw error(errc::bad_format, "implausible signature header sizes");
  if (hop == 0) throw error(errc::bad_format, "hop must be >= 1");
  if (kind > 1) throw error(errc::bad_format, "unknown family kind " + std::to_string(kind));

  signature_set sigs(node_count, n, hop, {static_cast<hash_kind>(kind), seed, n});
  const std::size_t record_bytes = static_cast<std::size_t>((n + 7) / 8);
  std::vector<unsigned char> record(record_bytes);
  const std::uint64_t tail_bits = n % 64;
  for (node_id u = 0; u < node_count; ++u) {
    if (!in.read(reinterpret_cast<char*>(record.data()), static_cast<std::streamsize>(record_bytes)))
      throw error(errc::bad_format, "truncated signature record for node " + std::to_string(u));
    auto words = sigs.mutable_words(u);
    for (std::size_t b = 0; b < record_bytes; ++b) words[b / 8] |= static_cast<std::uint64_t>(record[b]) << (8 * (b % 8));
    if (tail_bits != 0 && (words.back() >> tail_bits) != 0)
      throw error(errc::bad_format, "bits beyond signature length are set for node " + std::to_string(u));
    sigs.refresh(u);
  }
  return sigs;
}

inline void save_signatures(const std::string& path, const signature_set& sigs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error(errc::io_error, "cannot open '" + path + "' for writing");
  write_signatures(out, sigs);
}

inline signature_set load_signatures(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_error, "cannot open '" + path + "'");
  return read_signatures(in);
}

}  // namespace bsig
