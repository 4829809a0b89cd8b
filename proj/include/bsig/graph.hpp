#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsig/error.hpp"
#include "bsig/hashing.hpp"

namespace bsig {

/// Strictly increasing list of node ids.
using node_set = std::vector<node_id>;

using edge = std::pair<node_id, node_id>;

/// Immutable undirected simple graph in compressed adjacency form.
/// Neighbor lists are sorted, duplicate-free, symmetric and loop-free.
class graph {
 public:
  graph() : offsets_(1, 0) {}

  /// Builds from an arbitrary edge list; self-loops and duplicates (in either
  /// orientation) are dropped. node_count must exceed every endpoint.
  static graph from_edges(std::size_t node_count, std::vector<edge> edges) {
    for (auto& [a, b] : edges) {
      if (a >= node_count || b >= node_count)
        throw error(errc::node_out_of_range, "edge endpoint exceeds node count");
      if (a > b) std::swap(a, b);
    }
    std::erase_if(edges, [](const edge& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    graph g;
    g.edge_count_ = edges.size();
    g.offsets_.assign(node_count + 1, 0);
    for (const auto& [a, b] : edges) {
      ++g.offsets_[a + 1];
      ++g.offsets_[b + 1];
    }
    for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.neighbors_.resize(2 * edges.size());
    std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
      g.neighbors_[cursor[a]++] = b;
      g.neighbors_[cursor[b]++] = a;
    }
    for (std::size_t u = 0; u < node_count; ++u)
      std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
    return g;
  }

  [[nodiscard]] std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }

  [[nodiscard]] std::span<const node_id> neighbors(node_id u) const noexcept {
    return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
  }

  [[nodiscard]] std::size_t degree(node_id u) const noexcept { return offsets_[u + 1] - offsets_[u]; }

  [[nodiscard]] bool has_edge(node_id u, node_id v) const noexcept {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  void check_node(node_id u) const {
    if (u >= node_count())
      throw error(errc::node_out_of_range,
                  "node " + std::to_string(u) + " >= node count " + std::to_string(node_count()));
  }

  /// Edges as (u, v) with u < v, in ascending order.
  [[nodiscard]] std::vector<edge> edges() const {
    std::vector<edge> out;
    out.reserve(edge_count_);
    for (node_id u = 0; u < node_count(); ++u)
      for (node_id v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  std::vector<std::uint64_t> offsets_;
  std::vector<node_id> neighbors_;
  std::size_t edge_count_ = 0;
};

// ---------------------------------------------------------------------------
// Edge-list text format: "u v" per line, '#' comments, LF or CRLF.

inline graph load_edge_list(std::istream& in) {
  std::vector<edge> edges;
  std::string line;
  std::size_t line_no = 0;
  std::uint64_t max_id = 0;
  bool any = false;

  auto parse_id = [&](std::string_view tok) -> node_id {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() ||
        value >= std::numeric_limits<node_id>::max())
      throw error(errc::malformed_line, "line " + std::to_string(line_no) + ": bad node id '" +
                                            std::string(tok) + "'");
    return static_cast<node_id>(value);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    const auto first = sv.find_first_not_of(" \t");
    if (first == std::string_view::npos || sv[first] == '#') continue;

    std::string_view toks[3];
    std::size_t count = 0;
    std::size_t pos = first;
    while (pos < sv.size() && count < 3) {
      const auto end = std::min(sv.find_first_of(" \t", pos), sv.size());
      toks[count++] = sv.substr(pos, end - pos);
      pos = sv.find_first_not_of(" \t", end);
      if (pos == std::string_view::npos) break;
    }
    if (count != 2)
      throw error(errc::malformed_line, "line " + std::to_string(line_no) + ": expected two node ids");

    const node_id u = parse_id(toks[0]);
    const node_id v = parse_id(toks[1]);
    max_id = std::max<std::uint64_t>({max_id, u, v});
    any = true;
    edges.emplace_back(u, v);
  }
  if (!any) throw error(errc::empty_input, "edge list contains no edges");
  return graph::from_edges(max_id + 1, std::move(edges));
}

inline void write_edge_list(std::ostream& out, const graph& g, std::string_view header = {}) {
  if (!header.empty()) out << "# " << header << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

// ---------------------------------------------------------------------------
// Random graph models. Both draw from mt19937_64 with hand-rolled variate
// conversion so edge sets are bit-reproducible across standard libraries.

namespace detail {
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// G(N, p): every unordered pair is an edge independently with probability p.
/// Uses geometric skipping between successive edges, O(N + E).
inline graph gen_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw error(errc::invalid_probability, "p must lie in [0, 1]");
  if (n < 1) throw error(errc::invalid_parameters, "N must be >= 1");

  std::vector<edge> edges;
  if (p == 0.0 || n < 2) return graph::from_edges(n, std::move(edges));
  if (p == 1.0) {
    for (node_id v = 1; v < n; ++v)
      for (node_id w = 0; w < v; ++w) edges.emplace_back(w, v);
    return graph::from_edges(n, std::move(edges));
  }

  std::mt19937_64 rng(seed);
  const double log_q = std::log1p(-p);
  edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n - 1) / 2 * 1.05) + 16);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = detail::uniform01(rng);
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<node_id>(w), static_cast<node_id>(v));
  }
  return graph::from_edges(n, std::move(edges));
}

/// Preferential attachment: a clique on nodes [0, m), then every new node
/// attaches m distinct edges to earlier nodes chosen proportionally to degree
/// (uniformly while all earlier degrees are zero). E = C(m,2) + m(N-m).
inline graph gen_barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw error(errc::invalid_parameters, "BA requires 1 <= m < N");

  std::mt19937_64 rng(seed);
  std::vector<edge> edges;
  edges.reserve(m * (m - 1) / 2 + m * (n - m));
  std::vector<node_id> endpoints;  // each node repeated deg(node) times
  endpoints.reserve(2 * edges.capacity());

  for (node_id a = 0; a < m; ++a)
    for (node_id b = a + 1; b < m; ++b) {
      edges.emplace_back(a, b);
      endpoints.push_back(a);
      endpoints.push_back(b);
    }

  std::vector<node_id> targets;
  std::vector<std::uint32_t> picked_at(n, std::numeric_limits<std::uint32_t>::max());
  for (node_id t = static_cast<node_id>(m); t < n; ++t) {
    targets.clear();
    while (targets.size() < m) {
      node_id cand;
      if (endpoints.empty())
        cand = static_cast<node_id>(fast_range(rng(), t));
      else
        cand = endpoints[fast_range(rng(), endpoints.size())];
      if (picked_at[cand] == t) continue;  // collision: resample
      picked_at[cand] = t;
      targets.push_back(cand);
    }
    for (node_id x : targets) {
      edges.emplace_back(x, t);
      endpoints.push_back(x);
      endpoints.push_back(t);
    }
  }
  return graph::from_edges(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Neighborhoods. The center is never part of its own neighborhood.

/// Reusable BFS state; one per worker.
class bfs_scratch {
 public:
  /// Visits nodes level by level out to depth k; visit(w, depth) is called once
  /// per reached node other than u, with depth in [1, k].
  template <typename Visit>
  void walk(const graph& g, node_id u, unsigned k, Visit&& visit) {
    if (stamp_.size() != g.node_count()) {
      stamp_.assign(g.node_count(), 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    frontier_.assign(1, u);
    stamp_[u] = epoch_;
    for (unsigned depth = 1; depth <= k && !frontier_.empty(); ++depth) {
      next_.clear();
      for (node_id x : frontier_)
        for (node_id w : g.neighbors(x))
          if (stamp_[w] != epoch_) {
            stamp_[w] = epoch_;
            next_.push_back(w);
            visit(w, depth);
          }
      frontier_.swap(next_);
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<node_id> frontier_;
  std::vector<node_id> next_;
};

/// {w : 1 <= SPD(u, w) <= k}.
inline node_set k_hop_neighborhood(const graph& g, node_id u, unsigned k, bfs_scratch& scratch) {
  g.check_node(u);
  if (k < 1) throw error(errc::invalid_parameters, "hop count must be >= 1");
  node_set out;
  if (k == 1) {
    auto nb = g.neighbors(u);
    return {nb.begin(), nb.end()};
  }
  scratch.walk(g, u, k, [&](node_id w, unsigned) { out.push_back(w); });
  std::sort(out.begin(), out.end());
  return out;
}

inline node_set k_hop_neighborhood(const graph& g, node_id u, unsigned k) {
  bfs_scratch scratch;
  return k_hop_neighborhood(g, u, k, scratch);
}

/// {w : SPD(u, w) = k}.
inline node_set distance_shell(const graph& g, node_id u, unsigned k, bfs_scratch& scratch) {
  g.check_node(u);
  if (k < 1) throw error(errc::invalid_parameters, "hop count must be >= 1");
  node_set out;
  scratch.walk(g, u, k, [&](node_id w, unsigned depth) {
    if (depth == k) out.push_back(w);
  });
  std::sort(out.begin(), out.end());
  return out;
}

inline node_set distance_shell(const graph& g, node_id u, unsigned k) {
  bfs_scratch scratch;
  return distance_shell(g, u, k, scratch);
}

// Sorted-set helpers shared by the oracle and the benches.

inline std::size_t intersection_size(std::span<const node_id> a, std::span<const node_id> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

inline node_set set_intersection(std::span<const node_id> a, std::span<const node_id> b) {
  node_set out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline node_set set_union(std::span<const node_id> a, std::span<const node_id> b) {
  node_set out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline node_set set_difference(std::span<const node_id> a, std::span<const node_id> b) {
  node_set out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace bsig
