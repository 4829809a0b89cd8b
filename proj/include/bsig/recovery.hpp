#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/graph.hpp"
#include "bsig/hashing.hpp"
#include "bsig/oracle.hpp"
#include "bsig/signature.hpp"

// Training-free recovery networks: one hidden unit per graph node v_j testing
// the two signature bits at H(v_j), output weight d(v_j). No training; the
// weights follow directly from the hash family and the node weights.

namespace bsig {

enum class network_kind { intersection, union_, difference };

class constructed_network {
 public:
  [[nodiscard]] network_kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::uint64_t signature_bits() const noexcept { return n_; }
  [[nodiscard]] std::size_t hidden_width() const noexcept { return node_weights_.size(); }
  [[nodiscard]] const std::vector<double>& node_weights() const noexcept { return node_weights_; }
  [[nodiscard]] const std::vector<std::uint64_t>& hidden_buckets() const noexcept { return buckets_; }
  [[nodiscard]] const family_fingerprint& fingerprint() const noexcept { return fp_; }

  /// Largest node weight (d_max in the error bound).
  [[nodiscard]] double max_weight() const noexcept {
    double m = 0.0;
    for (double w : node_weights_) m = std::max(m, w);
    return m;
  }

  /// Activation of hidden unit with bucket bits (bu, bv).
  [[nodiscard]] bool fires(bool bu, bool bv) const noexcept {
    switch (kind_) {
      case network_kind::intersection: return bu && bv;
      case network_kind::union_: return bu || bv;
      case network_kind::difference: return bu && !bv;
    }
    return false;
  }

 private:
  friend constructed_network construct_network(const graph&, const heuristic_spec&, const hash_family&, network_kind);

  network_kind kind_ = network_kind::intersection;
  std::uint64_t n_ = 0;
  std::vector<double> node_weights_;
  std::vector<std::uint64_t> buckets_;
  std::vector<double> bucket_weights_;
  family_fingerprint fp_;

  friend double evaluate_bucketed(const constructed_network&, const signature_view&, const signature_view&);
};

/// Builds the network for weights f(d(v)) from `weights` (its weight kind,
/// table and transform; set operator and hops are ignored). Nodes on which
/// the degree-based weights are undefined (isolated nodes for 1/deg, degree
/// <= 1 for 1/ln deg) get weight 0: they can never be a common neighbor.
inline constructed_network construct_network(const graph& g, const heuristic_spec& weights, const hash_family& f,
                                             network_kind kind) {
  if (f.kind() == hash_kind::identity && f.range() < g.node_count())
    throw error(errc::identity_range_exceeded, "identity family range is smaller than the node count");

  constructed_network net;
  net.kind_ = kind;
  net.n_ = f.range();
  net.fp_ = f.fingerprint();
  net.node_weights_.resize(g.node_count());
  net.buckets_.resize(g.node_count());
  net.bucket_weights_.assign(f.range(), 0.0);
  for (node_id v = 0; v < g.node_count(); ++v) {
    double w = 0.0;
    try {
      w = weights.transform(node_weight(g, weights, v));
    } catch (const error& e) {
      if (weights.weight == weight_kind::table) throw error(errc::undefined_weight, e.what());
      w = 0.0;
    }
    net.node_weights_[v] = w;
    net.buckets_[v] = f.bucket_unchecked(v);
    net.bucket_weights_[net.buckets_[v]] += w;
  }
  return net;
}

inline constructed_network construct_network(const graph& g, weight_kind weight, const hash_family& f,
                                             network_kind kind) {
  heuristic_spec spec;
  spec.weight = weight;
  return construct_network(g, spec, f, kind);
}

namespace detail {
inline void require_network_inputs(const constructed_network& net, const signature_view& su,
                                   const signature_view& sv) {
  require_same_family(net.fingerprint(), su.fingerprint());
  require_same_family(net.fingerprint(), sv.fingerprint());
}
}  // namespace detail

/// Sum over hidden units j, in node order, of d(v_j) * a_j. Summing in node
/// order keeps the result >= the exact enumerated sum even in floating point
/// when the weights are nonnegative (extra false-positive terms only add).
inline double evaluate(const constructed_network& net, const signature_view& su, const signature_view& sv) {
  detail::require_network_inputs(net, su, sv);
  const auto& buckets = net.hidden_buckets();
  const auto& weights = net.node_weights();
  double total = 0.0;
  for (std::size_t j = 0; j < buckets.size(); ++j)
    if (net.fires(su.test(buckets[j]), sv.test(buckets[j]))) total += weights[j];
  return total;
}

/// Same function evaluated per bucket: merge the two signatures word-wise
/// (AND / OR / AND-NOT) and add the pre-aggregated weight of every set bucket.
/// Equal to evaluate() up to summation order.
inline double evaluate_bucketed(const constructed_network& net, const signature_view& su, const signature_view& sv) {
  detail::require_network_inputs(net, su, sv);
  const auto a = su.words();
  const auto b = sv.words();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t m = 0;
    switch (net.kind_) {
      case network_kind::intersection: m = a[i] & b[i]; break;
      case network_kind::union_: m = a[i] | b[i]; break;
      case network_kind::difference: m = a[i] & ~b[i]; break;
    }
    while (m) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(m));
      total += net.bucket_weights_[i * 64 + bit];
      m &= m - 1;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Dense one-hidden-layer form, for cross-checking the logical evaluation.
//   out = sigma([s_u s_v] W1 + b1) W2 + b2
// Intersection: W1 has ones at rows H(v_j) and n + H(v_j), b1 = -1, ReLU.
// Union: same W1, b1 = 0, step sigma(x) = [x >= 1].
// Difference: W1 = -1 at row H(v_j) and +1 at row n + H(v_j), b1 = +1,
//             sigma(x) = [x == 0], which fires exactly on s_u = 1, s_v = 0.

struct dense_network {
  network_kind kind;
  std::size_t inputs;  // 2n
  std::size_t hidden;  // N
  std::vector<double> w1;  // inputs x hidden, row-major
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

inline dense_network to_dense(const constructed_network& net) {
  const std::size_t n = net.signature_bits();
  const std::size_t hidden = net.hidden_width();
  dense_network d{net.kind(), 2 * n, hidden, std::vector<double>(2 * n * hidden, 0.0), std::vector<double>(hidden, 0.0),
                  net.node_weights(), 0.0};
  for (std::size_t j = 0; j < hidden; ++j) {
    const std::size_t h = net.hidden_buckets()[j];
    switch (net.kind()) {
      case network_kind::intersection:
        d.w1[h * hidden + j] = 1.0;
        d.w1[(n + h) * hidden + j] = 1.0;
        d.b1[j] = -1.0;
        break;
      case network_kind::union_:
        d.w1[h * hidden + j] = 1.0;
        d.w1[(n + h) * hidden + j] = 1.0;
        d.b1[j] = 0.0;
        break;
      case network_kind::difference:
        d.w1[h * hidden + j] = -1.0;
        d.w1[(n + h) * hidden + j] = 1.0;
        d.b1[j] = 1.0;
        break;
    }
  }
  return d;
}

inline double evaluate_dense(const dense_network& d, const signature_view& su, const signature_view& sv) {
  const std::size_t n = d.inputs / 2;
  std::vector<double> x(d.b1);
  for (std::size_t i = 0; i < d.inputs; ++i) {
    const bool bit = i < n ? su.test(i) : sv.test(i - n);
    if (!bit) continue;
    for (std::size_t j = 0; j < d.hidden; ++j) x[j] += d.w1[i * d.hidden + j];
  }
  double out = d.b2;
  for (std::size_t j = 0; j < d.hidden; ++j) {
    double a = 0.0;
    switch (d.kind) {
      case network_kind::intersection: a = std::max(0.0, x[j]); break;
      case network_kind::union_: a = x[j] >= 1.0 ? 1.0 : 0.0; break;
      case network_kind::difference: a = x[j] == 0.0 ? 1.0 : 0.0; break;
    }
    out += a * d.w2[j];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error bounds for the constructed networks (natural log).

/// Probability that a node outside a set of size `card` tests positive in its
/// signature: 1 - (1 - 1/n)^card.
inline double false_positive_rate(std::uint64_t card, std::uint64_t n) {
  if (card == 0) return 0.0;
  return -std::expm1(static_cast<double>(card) * std::log1p(-1.0 / static_cast<double>(n)));
}

namespace detail {
// Chernoff upper tail term (1 + sqrt(-3 ln delta / (s p))) s p; 0 when s p = 0.
inline double chernoff_term(std::uint64_t size, double p, double delta) {
  const double mean = static_cast<double>(size) * p;
  if (size == 0 || mean <= 0.0) return 0.0;
  return (1.0 + std::sqrt(-3.0 * std::log(delta) / mean)) * mean;
}
}  // namespace detail

struct partition_sizes {
  std::uint64_t complement = 0;  // |S_C|
  std::uint64_t only_u = 0;      // |S_Dv| = |N(u) \ N(v)|
  std::uint64_t only_v = 0;      // |S_Du| = |N(v) \ N(u)|
};

/// Upper bound on (output - exact) for the intersection network, holding with
/// probability >= 1 - 3 delta.
inline double theorem2_bound(const partition_sizes& sizes, std::uint64_t card_u, std::uint64_t card_v,
                             std::uint64_t n, double d_max, double delta) {
  const double pu = false_positive_rate(card_u, n);
  const double pv = false_positive_rate(card_v, n);
  return d_max * (detail::chernoff_term(sizes.complement, pu * pv, delta) +
                  detail::chernoff_term(sizes.only_u, pv, delta) + detail::chernoff_term(sizes.only_v, pu, delta));
}

}  // namespace bsig
