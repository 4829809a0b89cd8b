#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "bsig/baseline.hpp"
#include "bsig/csv.hpp"
#include "bsig/error.hpp"
#include "bsig/graph.hpp"
#include "bsig/hashing.hpp"
#include "bsig/parallel.hpp"
#include "bsig/recovery.hpp"
#include "bsig/signature.hpp"

// Experiment harness: intersection MAE against memory budget, Monte Carlo
// coverage of the error bounds, and merge+estimate throughput.

namespace bsig {

enum class method { bloom, minhash_hll };

inline std::string to_string(method m) { return m == method::bloom ? "bloom" : "minhash_hll"; }

/// Node pairs drawn uniformly over unordered pairs (u != v).
inline std::vector<edge> sample_pairs(std::size_t node_count, std::size_t count, std::uint64_t seed) {
  if (node_count < 2) throw error(errc::invalid_parameters, "pair sampling needs at least two nodes");
  std::mt19937_64 rng(seed);
  std::vector<edge> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    const auto u = static_cast<node_id>(fast_range(rng(), node_count));
    const auto v = static_cast<node_id>(fast_range(rng(), node_count));
    if (u != v) pairs.emplace_back(u, v);
  }
  return pairs;
}

namespace detail {

// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Distinct nodes of a pair list, sorted, plus their index lookup.
struct pair_nodes {
  std::vector<node_id> nodes;
  std::unordered_map<node_id, std::size_t> index;
};

inline pair_nodes collect_nodes(const std::vector<edge>& pairs) {
  pair_nodes out;
  for (const auto& [u, v] : pairs) {
    out.nodes.push_back(u);
    out.nodes.push_back(v);
  }
  std::sort(out.nodes.begin(), out.nodes.end());
  out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
  for (std::size_t i = 0; i < out.nodes.size(); ++i) out.index.emplace(out.nodes[i], i);
  return out;
}

inline std::vector<node_set> neighborhoods_of(const graph& g, const std::vector<node_id>& nodes, unsigned hop,
                                              unsigned threads) {
  if (threads == 0) threads = default_threads();
  std::vector<node_set> sets(nodes.size());
  std::vector<bfs_scratch> scratch(threads);
  parallel_for(nodes.size(), threads, [&](unsigned w, std::size_t i) {
    sets[i] = k_hop_neighborhood(g, nodes[i], hop, scratch[w]);
  });
  return sets;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// MAE sweep

struct sweep_config {
  std::string graph_desc;
  std::vector<unsigned> hops{1, 2};
  std::vector<std::uint64_t> budgets_bits{4096, 8192, 16384, 32768, 65536};
  std::vector<method> methods{method::bloom, method::minhash_hll};
  std::size_t num_pairs = 2000;
  std::vector<std::uint64_t> seeds{42};
  double delta = 0.05;
  unsigned threads = 0;

  void validate() const {
    if (num_pairs < 1) throw error(errc::invalid_parameters, "num_pairs must be >= 1");
    if (hops.empty() || budgets_bits.empty() || methods.empty() || seeds.empty())
      throw error(errc::invalid_parameters, "sweep lists must be non-empty");
    for (auto h : hops)
      if (h < 1) throw error(errc::invalid_parameters, "hops must be >= 1");
    for (auto b : budgets_bits)
      if (b < 64) throw error(errc::invalid_parameters, "budgets must be >= 64 bits");
    if (!(delta > 0.0 && delta < 1.0)) throw error(errc::invalid_probability, "delta must lie in (0, 1)");
  }
};

struct report_row {
  method meth;
  unsigned hop;
  std::uint64_t budget_bits;
  double mae;
  double p50_abs_err;
  double p95_abs_err;
  std::size_t num_pairs;
  std::string graph_desc;
  std::uint64_t seed;
};

/// One evaluated pair, for optional dumps.
struct pair_error {
  method meth;
  unsigned hop;
  std::uint64_t budget_bits;
  std::uint64_t seed;
  node_id u;
  node_id v;
  double exact;
  double estimate;
};

/// Pairs whose exact computation would touch more nodes than this are skipped.
inline constexpr std::size_t kMaxOracleTouch = 10'000'000;

inline std::vector<report_row> run_mae_sweep(const graph& g, const sweep_config& cfg,
                                             std::vector<pair_error>* dump = nullptr) {
  cfg.validate();
  const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
  const bool want_sketch =
      std::find(cfg.methods.begin(), cfg.methods.end(), method::minhash_hll) != cfg.methods.end();

  std::vector<report_row> rows;
  for (const auto seed : cfg.seeds) {
    const auto all_pairs = sample_pairs(g.node_count(), cfg.num_pairs, derive_seed(seed, 0));
    const auto pn = detail::collect_nodes(all_pairs);

    for (const unsigned hop : cfg.hops) {
      const auto sets = detail::neighborhoods_of(g, pn.nodes, hop, threads);

      std::vector<edge> pairs;
      std::vector<double> exact;
      for (const auto& [u, v] : all_pairs) {
        const auto& a = sets[pn.index.at(u)];
        const auto& b = sets[pn.index.at(v)];
        if (a.size() + b.size() > kMaxOracleTouch) continue;
        pairs.emplace_back(u, v);
        exact.push_back(static_cast<double>(intersection_size(a, b)));
      }

      // MinHash registers for the largest budget; smaller budgets use prefixes.
      std::vector<minhash_sketch> mh_full;
      const std::uint64_t mh_seed = derive_seed(seed, 0x100 + hop);
      if (want_sketch) {
        std::size_t r_max = 0;
        for (auto b : cfg.budgets_bits) r_max = std::max(r_max, split_budget(b).minhash_registers);
        mh_full.resize(pn.nodes.size());
        parallel_for(pn.nodes.size(), threads,
                     [&](unsigned, std::size_t i) { mh_full[i] = build_minhash(sets[i], r_max, mh_seed); });
      }

      for (const auto budget : cfg.budgets_bits) {
        for (const auto m : cfg.methods) {
          std::vector<double> estimates(pairs.size());
          if (m == method::bloom) {
            const auto family = hash_family::avalanche(derive_seed(seed, hop), budget);
            std::vector<bloom_signature> sigs;
            sigs.reserve(pn.nodes.size());
            for (std::size_t i = 0; i < pn.nodes.size(); ++i) sigs.emplace_back(budget, hop, family.fingerprint());
            parallel_for(pn.nodes.size(), threads,
                         [&](unsigned, std::size_t i) { sigs[i] = build_signature(sets[i], family, hop); });
            const estimate_options opt{.clamp_saturated = true};
            parallel_for(pairs.size(), threads, [&](unsigned, std::size_t i) {
              estimates[i] = estimate_intersection(sigs[pn.index.at(pairs[i].first)], sigs[pn.index.at(pairs[i].second)], opt);
            });
          } else {
            const auto split = split_budget(budget);
            const std::uint64_t hll_seed = derive_seed(seed, 0x200 + hop);
            std::vector<minhash_sketch> mh(pn.nodes.size());
            std::vector<hll_sketch> hll(pn.nodes.size(), hll_sketch(split.hll_precision, hll_seed));
            parallel_for(pn.nodes.size(), threads, [&](unsigned, std::size_t i) {
              mh[i] = mh_full[i].prefix(split.minhash_registers);
              hll[i] = build_hll(sets[i], split.hll_precision, hll_seed);
            });
            parallel_for(pairs.size(), threads, [&](unsigned, std::size_t i) {
              const auto a = pn.index.at(pairs[i].first);
              const auto b = pn.index.at(pairs[i].second);
              estimates[i] = estimate_intersection_two_step(mh[a], mh[b], hll[a], hll[b]);
            });
          }

          std::vector<double> errs(pairs.size());
          for (std::size_t i = 0; i < pairs.size(); ++i) errs[i] = std::abs(estimates[i] - exact[i]);
          const double mae =
              errs.empty() ? 0.0 : std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
          if (dump)
            for (std::size_t i = 0; i < pairs.size(); ++i)
              dump->push_back({m, hop, budget, seed, pairs[i].first, pairs[i].second, exact[i], estimates[i]});
          std::sort(errs.begin(), errs.end());
          rows.push_back({m, hop, budget, mae, detail::quantile_sorted(errs, 0.5), detail::quantile_sorted(errs, 0.95),
                          pairs.size(), cfg.graph_desc, seed});
        }
      }
    }
  }
  return rows;
}

inline void write_report_csv(std::ostream& out, const std::vector<report_row>& rows) {
  out << "method,hop,budget_bits,mae,p50_abs_err,p95_abs_err,num_pairs,graph_desc,seed\n";
  for (const auto& r : rows)
    csv::row(out, to_string(r.meth), r.hop, r.budget_bits, r.mae, r.p50_abs_err, r.p95_abs_err,
             static_cast<std::uint64_t>(r.num_pairs), r.graph_desc, r.seed);
}

// ---------------------------------------------------------------------------
// Bound coverage

struct coverage_config {
  unsigned hop = 1;
  std::uint64_t bits = 4096;
  double delta = 0.05;
  std::size_t trials = 2000;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

struct coverage_row {
  std::string bound;
  double delta;
  std::size_t trials;
  std::size_t violations;
  double rate;
  double allowed;
  bool pass;
};

/// Each trial draws a fresh hash seed, one node and one pair, and checks the
/// cardinality (lemma1), inner-product (lemma4), intersection (theorem1) and
/// recovery-network (theorem2) bounds. A bound passes when its violation rate
/// is at most the allowed failure probability plus three binomial sigma.
inline std::vector<coverage_row> run_bound_coverage(const graph& g, const coverage_config& cfg) {
  if (cfg.trials < 1) throw error(errc::invalid_parameters, "trials must be >= 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw error(errc::invalid_probability, "delta must lie in (0, 1)");
  if (g.node_count() < 2) throw error(errc::invalid_parameters, "coverage needs at least two nodes");

  const unsigned threads = cfg.threads == 0 ? default_threads() : cfg.threads;
  std::vector<node_id> all(g.node_count());
  std::iota(all.begin(), all.end(), node_id{0});
  const auto sets = detail::neighborhoods_of(g, all, cfg.hop, threads);

  const std::size_t T = cfg.trials;
  std::vector<std::uint8_t> v_l1(T), v_l4(T), v_t1(T), v_t2(T);
  parallel_for(T, threads, [&](unsigned, std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(cfg.seed, t);
    std::mt19937_64 rng(derive_seed(trial_seed, 1));
    const auto x = static_cast<node_id>(fast_range(rng(), g.node_count()));
    node_id u = 0, v = 0;
    do {
      u = static_cast<node_id>(fast_range(rng(), g.node_count()));
      v = static_cast<node_id>(fast_range(rng(), g.node_count()));
    } while (u == v);

    const auto family = hash_family::avalanche(trial_seed, cfg.bits);
    const estimate_options opt{};

    // Cardinality.
    const auto sx = build_signature(sets[x], family, cfg.hop);
    if (sx.popcount() >= cfg.bits) {
      v_l1[t] = 1;
    } else {
      const double err = std::abs(estimate_cardinality(sx, opt) - static_cast<double>(sets[x].size()));
      v_l1[t] = err >= lemma1_bound(sets[x].size(), cfg.delta) ? 1 : 0;
    }

    // Pair bounds.
    const auto& a = sets[u];
    const auto& b = sets[v];
    const auto su = build_signature(a, family, cfg.hop);
    const auto sv = build_signature(b, family, cfg.hop);
    const auto inter = intersection_size(a, b);
    const auto ip = inner_product(su, sv);
    const double ip_dev = std::abs(static_cast<double>(ip) - expected_inner_product(a.size(), b.size(), inter, cfg.bits));
    v_l4[t] = ip_dev >= lemma4_bound(std::min(a.size(), b.size()), cfg.delta) ? 1 : 0;

    if (su.popcount() >= cfg.bits || sv.popcount() >= cfg.bits) {
      v_t1[t] = 1;
    } else {
      const double err = std::abs(estimate_intersection(su, sv, opt) - static_cast<double>(inter));
      v_t1[t] = err >= theorem1_bound(std::max(a.size(), b.size()), cfg.delta) ? 1 : 0;
    }

    // Recovery network with unit weights: output counts hidden units firing.
    std::uint64_t fired = 0;
    for (node_id w = 0; w < g.node_count(); ++w) {
      const auto h = family.bucket_unchecked(w);
      fired += (su.test(h) && sv.test(h)) ? 1 : 0;
    }
    // Sizes under the partition_sets convention: endpoints belong to S_C.
    const std::uint64_t linked = std::binary_search(a.begin(), a.end(), v) ? 1 : 0;
    const std::uint64_t only_u = a.size() - inter - linked;
    const std::uint64_t only_v = b.size() - inter - linked;
    const partition_sizes sizes{g.node_count() - inter - only_u - only_v, only_u, only_v};
    const double bound = theorem2_bound(sizes, a.size(), b.size(), cfg.bits, 1.0, cfg.delta);
    v_t2[t] = static_cast<double>(fired - inter) > bound ? 1 : 0;
  });

  auto summarize = [&](const std::string& name, const std::vector<std::uint8_t>& flags, double allowed) {
    const std::size_t viol = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
    const double rate = static_cast<double>(viol) / static_cast<double>(T);
    const double sigma = std::sqrt(allowed * (1.0 - allowed) / static_cast<double>(T));
    return coverage_row{name, cfg.delta, T, viol, rate, allowed, rate <= allowed + 3.0 * sigma};
  };
  return {summarize("lemma1", v_l1, cfg.delta), summarize("lemma4", v_l4, cfg.delta),
          summarize("theorem1", v_t1, 3.0 * cfg.delta), summarize("theorem2", v_t2, 3.0 * cfg.delta)};
}

inline void write_coverage_csv(std::ostream& out, const std::vector<coverage_row>& rows) {
  out << "bound,delta,trials,violations,rate,allowed,pass\n";
  for (const auto& r : rows)
    csv::row(out, r.bound, r.delta, static_cast<std::uint64_t>(r.trials), static_cast<std::uint64_t>(r.violations),
             r.rate, r.allowed, r.pass);
}

// ---------------------------------------------------------------------------
// Throughput

struct throughput_config {
  std::size_t pairs = 100000;
  std::vector<unsigned> thread_counts{1};
  std::uint64_t budget_bits = 8192;
  unsigned hop = 1;
  std::uint64_t seed = 42;
  std::vector<method> methods{method::bloom, method::minhash_hll};
  unsigned repetitions = 3;
  unsigned build_threads = 0;
};

struct throughput_row {
  method meth;
  unsigned threads;
  std::uint64_t budget_bits;
  double pairs_per_second;
  double seconds;  // median wall time over repetitions
};

/// Prebuilt per-node encodings for every node of a graph at one budget.
struct prebuilt_encodings {
  std::optional<signature_set> bloom;
  std::vector<minhash_sketch> minhash;
  std::vector<hll_sketch> hll;
};

inline prebuilt_encodings prebuild(const graph& g, const throughput_config& cfg) {
  prebuilt_encodings enc;
  const unsigned threads = cfg.build_threads == 0 ? default_threads() : cfg.build_threads;
  for (auto m : cfg.methods) {
    if (m == method::bloom) {
      enc.bloom = build_all(g, cfg.hop, hash_family::avalanche(derive_seed(cfg.seed, cfg.hop), cfg.budget_bits), threads);
    } else {
      const auto split = split_budget(cfg.budget_bits);
      const std::uint64_t mh_seed = derive_seed(cfg.seed, 0x100 + cfg.hop);
      const std::uint64_t hll_seed = derive_seed(cfg.seed, 0x200 + cfg.hop);
      enc.minhash.resize(g.node_count());
      enc.hll.assign(g.node_count(), hll_sketch(split.hll_precision, hll_seed));
      std::vector<bfs_scratch> scratch(threads);
      parallel_for(g.node_count(), threads, [&](unsigned w, std::size_t i) {
        const auto set = k_hop_neighborhood(g, static_cast<node_id>(i), cfg.hop, scratch[w]);
        enc.minhash[i] = build_minhash(set, split.minhash_registers, mh_seed);
        enc.hll[i] = build_hll(set, split.hll_precision, hll_seed);
      });
    }
  }
  return enc;
}

/// Times Q merge+estimate operations per (method, thread count). Report only.
inline std::vector<throughput_row> run_throughput(const prebuilt_encodings& enc, std::size_t node_count,
                                                  const throughput_config& cfg) {
  std::vector<throughput_row> rows;
  if (cfg.pairs == 0) return rows;
  const auto pairs = sample_pairs(node_count, cfg.pairs, derive_seed(cfg.seed, 7));
  std::vector<double> sink(pairs.size());
  const estimate_options opt{.clamp_saturated = true};

  for (auto m : cfg.methods) {
    for (unsigned t : cfg.thread_counts) {
      std::vector<double> times;
      for (unsigned rep = 0; rep < std::max(1u, cfg.repetitions); ++rep) {
        const auto start = std::chrono::steady_clock::now();
        if (m == method::bloom) {
          const auto& sigs = *enc.bloom;
          parallel_for(pairs.size(), t, [&](unsigned, std::size_t i) {
            sink[i] = estimate_intersection(sigs[pairs[i].first], sigs[pairs[i].second], opt);
          });
        } else {
          parallel_for(pairs.size(), t, [&](unsigned, std::size_t i) {
            const auto a = pairs[i].first;
            const auto b = pairs[i].second;
            sink[i] = estimate_intersection_two_step(enc.minhash[a], enc.minhash[b], enc.hll[a], enc.hll[b]);
          });
        }
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
      }
      std::sort(times.begin(), times.end());
      const double secs = times[times.size() / 2];
      rows.push_back({m, t, cfg.budget_bits, secs > 0 ? static_cast<double>(pairs.size()) / secs : 0.0, secs});
    }
  }
  return rows;
}

inline void write_throughput_csv(std::ostream& out, const std::vector<throughput_row>& rows) {
  out << "method,threads,budget_bits,pairs_per_second\n";
  for (const auto& r : rows) csv::row(out, to_string(r.meth), r.threads, r.budget_bits, r.pairs_per_second);
}

}  // namespace bsig
