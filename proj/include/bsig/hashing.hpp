#pragma once

#include <cstdint>
#include <string>

#include "bsig/error.hpp"

namespace bsig {

using node_id = std::uint32_t;

/// MurmurHash3 64-bit finalizer.
constexpr std::uint64_t fmix64(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

/// Seeded 64-bit hash of a 64-bit key.
constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t key) noexcept {
  return fmix64(fmix64(seed ^ 0x6a09e667f3bcc909ULL) ^ (key * 0x9e3779b97f4a7c15ULL));
}

/// Independent sub-seed for stream `index` of a global seed (per-hop families,
/// per-register MinHash functions, per-trial coverage seeds).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix(seed ^ 0xbb67ae8584caa73bULL, index + 1);
}

/// Maps a 64-bit hash uniformly onto [0, n) with a multiply-high.
constexpr std::uint64_t fast_range(std::uint64_t hash, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(hash) * n) >> 64);
}

enum class hash_kind : std::uint8_t { avalanche = 0, identity = 1 };

inline std::string to_string(hash_kind k) { return k == hash_kind::avalanche ? "avalanche" : "identity"; }

/// Identifies the family a signature was built with; merges require equality.
struct family_fingerprint {
  hash_kind kind = hash_kind::avalanche;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;

  friend bool operator==(const family_fingerprint&, const family_fingerprint&) = default;
};

/// One hash function H: V -> [0, n). The identity kind is injective and is
/// used for exactness tests; it requires n to cover every queried id.
class hash_family {
 public:
  hash_family(hash_kind kind, std::uint64_t seed, std::uint64_t n) : kind_(kind), seed_(seed), n_(n) {
    if (n == 0) throw error(errc::zero_range, "hash family range must be >= 1");
  }

  static hash_family avalanche(std::uint64_t seed, std::uint64_t n) { return {hash_kind::avalanche, seed, n}; }
  static hash_family identity(std::uint64_t n) { return {hash_kind::identity, 0, n}; }

  [[nodiscard]] hash_kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t range() const noexcept { return n_; }
  [[nodiscard]] family_fingerprint fingerprint() const noexcept { return {kind_, seed_, n_}; }

  /// Bucket of node v. Unchecked for identity kind; see operator().
  [[nodiscard]] std::uint64_t bucket_unchecked(node_id v) const noexcept {
    return kind_ == hash_kind::identity ? v : fast_range(mix(seed_, v), n_);
  }

  [[nodiscard]] std::uint64_t operator()(node_id v) const {
    if (kind_ == hash_kind::identity && v >= n_)
      throw error(errc::identity_range_exceeded,
                  "node " + std::to_string(v) + " >= identity range " + std::to_string(n_));
    return bucket_unchecked(v);
  }

  /// The same family kind re-seeded for hop `hop`, so multi-hop signatures
  /// use independent functions. Identity families are returned unchanged.
  [[nodiscard]] hash_family for_hop(unsigned hop) const {
    if (kind_ == hash_kind::identity) return *this;
    return {kind_, derive_seed(seed_, hop), n_};
  }

 private:
  hash_kind kind_;
  std::uint64_t seed_;
  std::uint64_t n_;
};

inline std::uint64_t hash_node(const hash_family& f, node_id v) { return f(v); }

}  // namespace bsig
