#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/graph.hpp"
#include "bsig/hashing.hpp"
#include "bsig/parallel.hpp"

namespace bsig {

constexpr std::size_t words_for_bits(std::uint64_t n) noexcept { return static_cast<std::size_t>((n + 63) / 64); }

/// Read-only view of one signature: n bits packed little-endian into 64-bit
/// words, bits past n always zero.
class signature_view {
 public:
  signature_view(std::span<const std::uint64_t> words, std::uint64_t n, unsigned hop, family_fingerprint fp,
                 std::uint64_t popcount)
      : words_(words), n_(n), hop_(hop), fp_(fp), popcount_(popcount) {}

  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] unsigned hop() const noexcept { return hop_; }
  [[nodiscard]] const family_fingerprint& fingerprint() const noexcept { return fp_; }
  [[nodiscard]] std::uint64_t popcount() const noexcept { return popcount_; }
  [[nodiscard]] bool test(std::uint64_t j) const noexcept { return (words_[j >> 6] >> (j & 63)) & 1u; }

 private:
  std::span<const std::uint64_t> words_;
  std::uint64_t n_;
  unsigned hop_;
  family_fingerprint fp_;
  std::uint64_t popcount_;
};

inline std::uint64_t count_bits(std::span<const std::uint64_t> words) noexcept {
  std::uint64_t total = 0;
  for (auto w : words) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

/// Owning Bloom signature of a single neighborhood.
class bloom_signature {
 public:
  bloom_signature(std::uint64_t n, unsigned hop, family_fingerprint fp)
      : words_(words_for_bits(n), 0), n_(n), hop_(hop), fp_(fp) {}

  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] unsigned hop() const noexcept { return hop_; }
  [[nodiscard]] const family_fingerprint& fingerprint() const noexcept { return fp_; }
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::uint64_t popcount() const noexcept { return popcount_; }
  [[nodiscard]] bool test(std::uint64_t j) const noexcept { return (words_[j >> 6] >> (j & 63)) & 1u; }

  void set(std::uint64_t j) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    auto& w = words_[j >> 6];
    popcount_ += (w & mask) ? 0 : 1;
    w |= mask;
  }

  [[nodiscard]] signature_view view() const noexcept { return {words_, n_, hop_, fp_, popcount_}; }
  operator signature_view() const noexcept { return view(); }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const bloom_signature& a, const bloom_signature& b) {
    return a.n_ == b.n_ && a.hop_ == b.hop_ && a.fp_ == b.fp_ && a.words_ == b.words_;
  }

 private:
  std::vector<std::uint64_t> words_;
  std::uint64_t n_;
  unsigned hop_;
  family_fingerprint fp_;
  std::uint64_t popcount_ = 0;
};

/// Signatures of every node for one hop, stored contiguously.
class signature_set {
 public:
  signature_set(std::size_t node_count, std::uint64_t n, unsigned hop, family_fingerprint fp)
      : node_count_(node_count),
        n_(n),
        hop_(hop),
        fp_(fp),
        stride_(words_for_bits(n)),
        words_(node_count * stride_, 0),
        popcounts_(node_count, 0) {}

  [[nodiscard]] std::size_t node_count() const noexcept { return node_count_; }
  [[nodiscard]] std::uint64_t size() const noexcept { return n_; }
  [[nodiscard]] unsigned hop() const noexcept { return hop_; }
  [[nodiscard]] const family_fingerprint& fingerprint() const noexcept { return fp_; }
  [[nodiscard]] std::size_t words_per_signature() const noexcept { return stride_; }

  [[nodiscard]] signature_view operator[](node_id u) const noexcept {
    return {std::span<const std::uint64_t>(words_.data() + u * stride_, stride_), n_, hop_, fp_, popcounts_[u]};
  }

  [[nodiscard]] std::span<std::uint64_t> mutable_words(node_id u) noexcept {
    return {words_.data() + u * stride_, stride_};
  }

  /// Recomputes the cached popcount after mutable_words() edits.
  void refresh(node_id u) noexcept { popcounts_[u] = count_bits(mutable_words(u)); }

  friend bool operator==(const signature_set& a, const signature_set& b) {
    return a.node_count_ == b.node_count_ && a.n_ == b.n_ && a.hop_ == b.hop_ && a.fp_ == b.fp_ &&
           a.words_ == b.words_;
  }

 private:
  std::size_t node_count_;
  std::uint64_t n_;
  unsigned hop_;
  family_fingerprint fp_;
  std::size_t stride_;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> popcounts_;
};

inline void require_same_family(const family_fingerprint& a, const family_fingerprint& b) {
  if (!(a == b)) throw error(errc::fingerprint_mismatch, "signatures were built with different hash families");
}

// ---------------------------------------------------------------------------
// Construction

/// s[j] = OR of membership bits over all w with H(w) = j.
inline bloom_signature build_signature(std::span<const node_id> members, const hash_family& f, unsigned hop = 1) {
  bloom_signature sig(f.range(), hop, f.fingerprint());
  for (node_id w : members) sig.set(f(w));
  return sig;
}

/// Signatures of N^k(u) for every node u. Output does not depend on `threads`.
inline signature_set build_all(const graph& g, unsigned k, const hash_family& f, unsigned threads = 0) {
  if (k < 1) throw error(errc::invalid_parameters, "hop count must be >= 1");
  if (f.kind() == hash_kind::identity && f.range() < g.node_count())
    throw error(errc::identity_range_exceeded, "identity family range is smaller than the node count");

  signature_set out(g.node_count(), f.range(), k, f.fingerprint());
  if (threads == 0) threads = default_threads();
  std::vector<bfs_scratch> scratch(std::max(1u, threads));
  parallel_for(g.node_count(), threads, [&](unsigned worker, std::size_t i) {
    const auto u = static_cast<node_id>(i);
    auto words = out.mutable_words(u);
    auto mark = [&](node_id w) {
      const auto j = f.bucket_unchecked(w);
      words[j >> 6] |= std::uint64_t{1} << (j & 63);
    };
    if (k == 1) {
      for (node_id w : g.neighbors(u)) mark(w);
    } else {
      scratch[worker].walk(g, u, k, [&](node_id w, unsigned) { mark(w); });
    }
    out.refresh(u);
  });
  return out;
}

/// Returns sig with bit H(w) set. Insertion is idempotent and order-free.
inline bloom_signature insert_neighbor(bloom_signature sig, node_id w, const hash_family& f) {
  require_same_family(sig.fingerprint(), f.fingerprint());
  sig.set(f(w));
  return sig;
}

// ---------------------------------------------------------------------------
// Estimators

struct estimate_options {
  /// Treat a saturated signature (popcount = n) as popcount n-1 instead of
  /// raising SaturatedSignature.
  bool clamp_saturated = false;
};

namespace detail {

inline double effective_popcount(const signature_view& s, const estimate_options& opt) {
  const auto c = s.popcount();
  if (c >= s.size()) {
    if (!opt.clamp_saturated)
      throw error(errc::saturated_signature, "all " + std::to_string(s.size()) + " bits are set");
    return static_cast<double>(s.size() - 1);
  }
  return static_cast<double>(c);
}

// ln(rho) with rho = 1 - 1/n.
inline double log_rho(std::uint64_t n) { return std::log1p(-1.0 / static_cast<double>(n)); }

inline double cardinality_from_popcount(double c, std::uint64_t n) {
  if (c == 0.0) return 0.0;
  return std::log1p(-c / static_cast<double>(n)) / log_rho(n);
}

}  // namespace detail

/// n_hat = ln(1 - |s|/n) / ln(1 - 1/n).
inline double estimate_cardinality(const signature_view& s, const estimate_options& opt = {}) {
  return detail::cardinality_from_popcount(detail::effective_popcount(s, opt), s.size());
}

/// popcount(a AND b).
inline std::uint64_t inner_product(const signature_view& a, const signature_view& b) {
  require_same_family(a.fingerprint(), b.fingerprint());
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) total += static_cast<std::uint64_t>(std::popcount(wa[i] & wb[i]));
  return total;
}

/// Estimated |A ∩ B| from two signatures:
///   S = n_a + n_b - ln(rho^n_a + rho^n_b + <a,b>/n - 1) / ln rho
/// clamped to [0, min(n_a, n_b)]; a non-positive log argument yields
/// min(n_a, n_b). rho^n_hat is evaluated as 1 - |s|/n, which is its exact value.
inline double estimate_intersection(const signature_view& a, const signature_view& b,
                                    const estimate_options& opt = {}) {
  const auto ip = inner_product(a, b);
  const double ca = detail::effective_popcount(a, opt);
  const double cb = detail::effective_popcount(b, opt);
  const auto n = a.size();
  const double nd = static_cast<double>(n);
  const double na = detail::cardinality_from_popcount(ca, n);
  const double nb = detail::cardinality_from_popcount(cb, n);
  const double upper = std::min(na, nb);

  const double arg = ((1.0 - ca / nd) + (1.0 - cb / nd)) + static_cast<double>(ip) / nd - 1.0;
  if (!(arg > 0.0)) return upper;
  const double s = (na + nb) - std::log(arg) / detail::log_rho(n);
  return std::clamp(s, 0.0, upper);
}

inline constexpr double kMinCardinality = 1e-9;

/// S / sqrt(n_a n_b), clamped to [0, 1].
inline double estimate_cosine(const signature_view& a, const signature_view& b, const estimate_options& opt = {}) {
  const double s = estimate_intersection(a, b, opt);
  const double denom = estimate_cardinality(a, opt) * estimate_cardinality(b, opt);
  if (denom < kMinCardinality) return 0.0;
  return std::clamp(s / std::sqrt(denom), 0.0, 1.0);
}

/// S / n_a, clamped to [0, 1]. Not symmetric.
inline double estimate_containment(const signature_view& a, const signature_view& b,
                                   const estimate_options& opt = {}) {
  const double s = estimate_intersection(a, b, opt);
  const double na = estimate_cardinality(a, opt);
  if (na < kMinCardinality) return 0.0;
  return std::clamp(s / na, 0.0, 1.0);
}

/// E[<s_a, s_b>] = n (1 - rho^|A| - rho^|B| + rho^(|A|+|B|-|A∩B|)).
inline double expected_inner_product(std::uint64_t card_a, std::uint64_t card_b, std::uint64_t inter,
                                     std::uint64_t n) {
  const double lr = detail::log_rho(n);
  auto rho_pow = [&](double e) { return e == 0.0 ? 1.0 : std::exp(e * lr); };
  const double a = static_cast<double>(card_a);
  const double b = static_cast<double>(card_b);
  return static_cast<double>(n) * (1.0 - rho_pow(a) - rho_pow(b) + rho_pow(a + b - static_cast<double>(inter)));
}

// ---------------------------------------------------------------------------
// Error bounds (natural log throughout). delta >= 2 degenerates to 0.

/// Cardinality error bound: sqrt(4 m ln(2/delta)), m = true set size.
inline double lemma1_bound(std::uint64_t m, double delta) {
  return std::sqrt(4.0 * static_cast<double>(m) * std::max(0.0, std::log(2.0 / delta)));
}

/// Intersection error bound holding with probability 1 - 3 delta:
/// 6 sqrt(m) + 7 sqrt(2 m ln(2/delta)), m = max of the two set sizes.
inline double theorem1_bound(std::uint64_t m, double delta) {
  const double md = static_cast<double>(m);
  return 6.0 * std::sqrt(md) + 7.0 * std::sqrt(2.0 * md * std::max(0.0, std::log(2.0 / delta)));
}

/// Inner-product concentration: sqrt(2 min(|A|,|B|) ln(2/delta)).
inline double lemma4_bound(std::uint64_t min_card, double delta) {
  return std::sqrt(2.0 * static_cast<double>(min_card) * std::max(0.0, std::log(2.0 / delta)));
}

}  // namespace bsig
