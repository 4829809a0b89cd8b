#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/hashing.hpp"

// MinHash + HyperLogLog baseline: Jaccard from MinHash, cardinalities from
// HLL, intersection from the two combined.

namespace bsig {

inline constexpr std::uint64_t kMinHashEmpty = std::numeric_limits<std::uint64_t>::max();

/// r independent seeded hash functions; register i holds min_w h_i(w).
/// Register i depends only on (seed, i), so a sketch with fewer registers is
/// a prefix of one with more.
struct minhash_sketch {
  std::vector<std::uint64_t> registers;

  [[nodiscard]] std::size_t size() const noexcept { return registers.size(); }

  [[nodiscard]] minhash_sketch prefix(std::size_t r) const {
    if (r == 0 || r > registers.size()) throw error(errc::zero_registers, "prefix length out of range");
    return {{registers.begin(), registers.begin() + static_cast<std::ptrdiff_t>(r)}};
  }

  friend bool operator==(const minhash_sketch&, const minhash_sketch&) = default;
};

inline minhash_sketch build_minhash(std::span<const node_id> members, std::size_t r, std::uint64_t seed) {
  if (r == 0) throw error(errc::zero_registers, "MinHash needs at least one register");
  minhash_sketch sk{std::vector<std::uint64_t>(r, kMinHashEmpty)};
  for (std::size_t i = 0; i < r; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    std::uint64_t lo = kMinHashEmpty;
    for (node_id w : members) lo = std::min(lo, mix(s, w));
    sk.registers[i] = lo;
  }
  return sk;
}

/// Fraction of positions whose registers agree and are non-empty.
inline double estimate_jaccard(const minhash_sketch& a, const minhash_sketch& b) {
  if (a.size() != b.size()) throw error(errc::register_count_mismatch, "MinHash register counts differ");
  if (a.size() == 0) return 0.0;
  std::size_t match = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    match += (a.registers[i] == b.registers[i] && a.registers[i] != kMinHashEmpty) ? 1 : 0;
  return static_cast<double>(match) / static_cast<double>(a.size());
}

/// HyperLogLog with 2^p one-byte registers.
class hll_sketch {
 public:
  hll_sketch(unsigned precision, std::uint64_t seed) : p_(precision), seed_(seed) {
    if (precision < 4 || precision > 16) throw error(errc::invalid_precision, "HLL precision must be in [4, 16]");
    registers_.assign(std::size_t{1} << precision, 0);
  }

  void insert(node_id w) noexcept {
    const std::uint64_t h = mix(seed_, w);
    const std::size_t idx = static_cast<std::size_t>(h >> (64 - p_));
    const std::uint64_t rest = h << p_;
    const unsigned max_rank = 64 - p_ + 1;
    const unsigned rank = rest == 0 ? max_rank : std::min<unsigned>(static_cast<unsigned>(std::countl_zero(rest)) + 1, max_rank);
    registers_[idx] = std::max<std::uint8_t>(registers_[idx], static_cast<std::uint8_t>(rank));
  }

  [[nodiscard]] unsigned precision() const noexcept { return p_; }
  [[nodiscard]] std::span<const std::uint8_t> registers() const noexcept { return registers_; }

  /// Raw estimate alpha_m m^2 / sum 2^-M, with linear counting below 2.5 m.
  [[nodiscard]] double estimate() const noexcept {
    const double m = static_cast<double>(registers_.size());
    double alpha = 0.7213 / (1.0 + 1.079 / m);
    if (registers_.size() == 16) alpha = 0.673;
    else if (registers_.size() == 32) alpha = 0.697;
    else if (registers_.size() == 64) alpha = 0.709;

    double z = 0.0;
    std::size_t zeros = 0;
    for (auto r : registers_) {
      z += std::ldexp(1.0, -static_cast<int>(r));
      zeros += r == 0 ? 1 : 0;
    }
    const double raw = alpha * m * m / z;
    if (raw <= 2.5 * m && zeros > 0) return m * std::log(m / static_cast<double>(zeros));
    return raw;
  }

  friend bool operator==(const hll_sketch&, const hll_sketch&) = default;

 private:
  unsigned p_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> registers_;
};

inline hll_sketch build_hll(std::span<const node_id> members, unsigned precision, std::uint64_t seed) {
  hll_sketch h(precision, seed);
  for (node_id w : members) h.insert(w);
  return h;
}

inline double estimate_hll_cardinality(const hll_sketch& h) { return h.estimate(); }

/// J (|A| + |B|) / (1 + J), clamped to [0, min(|A|, |B|)].
inline double estimate_intersection_two_step(const minhash_sketch& mh_a, const minhash_sketch& mh_b,
                                             const hll_sketch& hll_a, const hll_sketch& hll_b) {
  const double j = estimate_jaccard(mh_a, mh_b);
  const double ca = hll_a.estimate();
  const double cb = hll_b.estimate();
  return std::clamp(j * (ca + cb) / (1.0 + j), 0.0, std::min(ca, cb));
}

/// Split of a memory budget in bits: 80% to 64-bit MinHash registers, 20% to
/// 8-bit HLL registers (rounded down to a power of two, p in [4, 16]).
struct sketch_budget {
  std::size_t minhash_registers;
  unsigned hll_precision;
};

inline sketch_budget split_budget(std::uint64_t bits) {
  const auto mh = static_cast<std::size_t>(bits * 8 / 10 / 64);
  const double hll_regs = static_cast<double>(bits) * 0.2 / 8.0;
  const int p = hll_regs >= 1.0 ? static_cast<int>(std::floor(std::log2(hll_regs))) : 0;
  return {std::max<std::size_t>(1, mh), static_cast<unsigned>(std::clamp(p, 4, 16))};
}

}  // namespace bsig
