#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/graph.hpp"

// Exact pairwise structural features by explicit set enumeration:
//   S(u, v) = sum over w in N^k1(u) (op) N^k2(v) of f(d(w)).

namespace bsig {

enum class set_op { intersection, union_, difference };

enum class weight_kind { unit, inverse_degree, inverse_log_degree, table };

/// Normalized overlap scores derived from |A ∩ B|, |A| and |B|.
enum class composite_kind { none, jaccard, cosine, containment };

/// Piecewise-linear scalar map through sorted sample points, constant beyond
/// the first and last sample. An empty map is the identity.
struct scalar_map {
  std::vector<double> xs;
  std::vector<double> ys;

  [[nodiscard]] bool is_identity() const noexcept { return xs.empty(); }

  [[nodiscard]] double operator()(double x) const {
    if (xs.empty()) return x;
    if (xs.size() != ys.size()) throw error(errc::invalid_parameters, "scalar map needs one y per x");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
  }
};

struct heuristic_spec {
  set_op op = set_op::intersection;
  unsigned hop_a = 1;
  unsigned hop_b = 1;
  weight_kind weight = weight_kind::unit;
  std::vector<double> weight_table;  // used when weight == table, indexed by node id
  scalar_map transform;              // f; identity when empty
  composite_kind composite = composite_kind::none;
};

/// d(w) for one node. inverse_log_degree uses the natural log and is
/// undefined for degree <= 1; inverse_degree is undefined for degree 0.
inline double node_weight(const graph& g, const heuristic_spec& spec, node_id w) {
  switch (spec.weight) {
    case weight_kind::unit:
      return 1.0;
    case weight_kind::inverse_degree: {
      const auto d = g.degree(w);
      if (d == 0) throw error(errc::undefined_weight, "1/deg undefined for isolated node " + std::to_string(w));
      return 1.0 / static_cast<double>(d);
    }
    case weight_kind::inverse_log_degree: {
      const auto d = g.degree(w);
      if (d <= 1) throw error(errc::undefined_weight, "1/ln(deg) undefined for node " + std::to_string(w) + " of degree " + std::to_string(d));
      return 1.0 / std::log(static_cast<double>(d));
    }
    case weight_kind::table:
      if (w >= spec.weight_table.size())
        throw error(errc::undefined_weight, "no table weight for node " + std::to_string(w));
      return spec.weight_table[w];
  }
  return 0.0;
}

inline node_set combine_sets(const node_set& a, const node_set& b, set_op op) {
  switch (op) {
    case set_op::intersection: return set_intersection(a, b);
    case set_op::union_: return set_union(a, b);
    case set_op::difference: return set_difference(a, b);
  }
  return {};
}

inline double exact_pairwise(const graph& g, node_id u, node_id v, const heuristic_spec& spec) {
  g.check_node(u);
  g.check_node(v);
  bfs_scratch scratch;
  const node_set a = k_hop_neighborhood(g, u, spec.hop_a, scratch);
  const node_set b = k_hop_neighborhood(g, v, spec.hop_b, scratch);

  if (spec.composite != composite_kind::none) {
    const double inter = static_cast<double>(intersection_size(a, b));
    const double ca = static_cast<double>(a.size());
    const double cb = static_cast<double>(b.size());
    switch (spec.composite) {
      case composite_kind::jaccard: {
        const double uni = ca + cb - inter;
        return uni == 0.0 ? 0.0 : inter / uni;
      }
      case composite_kind::cosine:
        return (ca == 0.0 || cb == 0.0) ? 0.0 : inter / std::sqrt(ca * cb);
      case composite_kind::containment:
        return ca == 0.0 ? 0.0 : inter / ca;
      case composite_kind::none:
        break;
    }
  }

  double total = 0.0;
  for (node_id w : combine_sets(a, b, spec.op)) total += spec.transform(node_weight(g, spec, w));
  return total;
}

enum class preset_name { cn, ra, aa, jaccard, cosine, containment };

inline std::optional<preset_name> parse_preset(std::string_view s) {
  if (s == "cn") return preset_name::cn;
  if (s == "ra") return preset_name::ra;
  if (s == "aa") return preset_name::aa;
  if (s == "jaccard") return preset_name::jaccard;
  if (s == "cosine") return preset_name::cosine;
  if (s == "containment") return preset_name::containment;
  return std::nullopt;
}

/// Standard heuristics as intersection-based specs over hop-k neighborhoods.
inline heuristic_spec preset(preset_name name, unsigned hop = 1) {
  heuristic_spec s;
  s.hop_a = s.hop_b = hop;
  switch (name) {
    case preset_name::cn: break;
    case preset_name::ra: s.weight = weight_kind::inverse_degree; break;
    case preset_name::aa: s.weight = weight_kind::inverse_log_degree; break;
    case preset_name::jaccard: s.composite = composite_kind::jaccard; break;
    case preset_name::cosine: s.composite = composite_kind::cosine; break;
    case preset_name::containment: s.composite = composite_kind::containment; break;
  }
  return s;
}

/// Pairwise features of hop-k neighborhoods: k*k intersection counts
/// |N^k1(u) ∩ N^k2(v)| in row-major (k1, k2) order, then k counts for u and k
/// for v of nodes at exact distance d from one endpoint and farther than k from
/// the other (the other endpoint itself sits at distance 0, so never counts).
struct buddy_vector {
  unsigned k = 0;
  std::vector<std::uint64_t> intersections;  // k*k
  std::vector<std::uint64_t> differences;    // 2k: u's shells, then v's

  [[nodiscard]] std::uint64_t intersection(unsigned k1, unsigned k2) const {
    return intersections[(k1 - 1) * k + (k2 - 1)];
  }
};

inline buddy_vector buddy_features(const graph& g, node_id u, node_id v, unsigned k) {
  g.check_node(u);
  g.check_node(v);
  if (k < 1) throw error(errc::invalid_parameters, "hop count must be >= 1");
  bfs_scratch scratch;
  std::vector<node_set> ball_u(k), ball_v(k), shell_u(k), shell_v(k);
  for (unsigned d = 1; d <= k; ++d) {
    ball_u[d - 1] = k_hop_neighborhood(g, u, d, scratch);
    ball_v[d - 1] = k_hop_neighborhood(g, v, d, scratch);
    shell_u[d - 1] = distance_shell(g, u, d, scratch);
    shell_v[d - 1] = distance_shell(g, v, d, scratch);
  }

  buddy_vector out;
  out.k = k;
  for (unsigned k1 = 1; k1 <= k; ++k1)
    for (unsigned k2 = 1; k2 <= k; ++k2) out.intersections.push_back(intersection_size(ball_u[k1 - 1], ball_v[k2 - 1]));

  auto far_count = [](const node_set& shell, const node_set& other_ball, node_id other) {
    std::uint64_t c = 0;
    for (node_id w : shell)
      if (w != other && !std::binary_search(other_ball.begin(), other_ball.end(), w)) ++c;
    return c;
  };
  for (unsigned d = 1; d <= k; ++d) out.differences.push_back(far_count(shell_u[d - 1], ball_v[k - 1], v));
  for (unsigned d = 1; d <= k; ++d) out.differences.push_back(far_count(shell_v[d - 1], ball_u[k - 1], u));
  return out;
}

/// Partition of V for a pair (u, v): intersection N(u) ∩ N(v), N(u) \ N(v),
/// N(v) \ N(u) and the complement. The endpoints u and v always go to the
/// complement, also when they are adjacent (then v would otherwise sit in
/// N(u) \ N(v)), so the four sizes sum to N.
struct pair_partition {
  node_set intersection;
  node_set complement;
  node_set only_u;  // S_Dv
  node_set only_v;  // S_Du
};

inline pair_partition partition_sets(const graph& g, node_id u, node_id v, unsigned hop = 1) {
  g.check_node(u);
  g.check_node(v);
  bfs_scratch scratch;
  const node_set a = k_hop_neighborhood(g, u, hop, scratch);
  const node_set b = k_hop_neighborhood(g, v, hop, scratch);
  const node_set ends = u == v ? node_set{u} : node_set{std::min(u, v), std::max(u, v)};
  pair_partition p;
  p.intersection = set_difference(set_intersection(a, b), ends);
  p.only_u = set_difference(set_difference(a, b), ends);
  p.only_v = set_difference(set_difference(b, a), ends);
  const node_set taken = set_union(set_union(p.intersection, p.only_u), p.only_v);
  auto it = taken.begin();
  for (node_id w = 0; w < g.node_count(); ++w) {
    while (it != taken.end() && *it < w) ++it;
    if (it == taken.end() || *it != w) p.complement.push_back(w);
  }
  return p;
}

}  // namespace bsig
