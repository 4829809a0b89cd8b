#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsig/bsig.hpp"
#include "bsig/csv.hpp"

using namespace bsig;

namespace {

enum exit_code { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

struct globals {
  std::uint64_t seed = 42;
  unsigned threads = 0;
  bool quiet = false;
};

globals g_opts;

/// A run completed but a checked property did not hold (exit 1).
struct check_failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void note(const std::string& msg) {
  if (!g_opts.quiet) std::cerr << msg << '\n';
}

unsigned thread_count() { return g_opts.threads == 0 ? default_threads() : g_opts.threads; }

int exit_for(errc code) {
  switch (code) {
    case errc::io_error:
    case errc::bad_format:
    case errc::malformed_line:
    case errc::empty_input:
      return kIo;
    case errc::saturated_signature:
    case errc::fingerprint_mismatch:
    case errc::undefined_weight:
    case errc::register_count_mismatch:
      return kFailed;
    default:
      return kUsage;
  }
}

[[noreturn]] void usage(const std::string& msg) { throw error(errc::invalid_parameters, msg); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

template <typename T>
T parse_number(const std::string& tok, const std::string& what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) usage("bad " + what + " '" + tok + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
  std::vector<T> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_number<T>(tok, what));
  if (out.empty()) usage("empty " + what + " list");
  return out;
}

// ---------------------------------------------------------------------------
// Graph sources

graph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io_error, "cannot open graph '" + path + "'");
  return load_edge_list(in);
}

struct graph_source {
  std::string path;
  std::string model;
  std::size_t nodes = 0;
  double p = -1.0;
  std::size_t m = 0;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--graph", path, "edge-list file");
    cmd->add_option("--model", model, "generate instead: er or ba")->check(CLI::IsMember({"er", "ba"}));
    cmd->add_option("--nodes", nodes, "generated node count");
    cmd->add_option("--p", p, "ER edge probability");
    cmd->add_option("--m", m, "BA edges per new node");
  }

  void set_default(std::string mdl, std::size_t n, double prob, std::size_t mm) {
    model = std::move(mdl);
    nodes = n;
    p = prob;
    m = mm;
  }

  [[nodiscard]] std::pair<graph, std::string> resolve() const {
    if (!path.empty()) return {load_graph_file(path), "file:" + path};
    if (model.empty()) usage("need --graph or --model");
    if (nodes == 0) usage("--nodes must be >= 1");
    const std::string seed = ":seed=" + std::to_string(g_opts.seed);
    if (model == "er") {
      if (p < 0.0) usage("--p is required for er");
      return {gen_erdos_renyi(nodes, p, g_opts.seed), "er:n=" + std::to_string(nodes) + ":p=" + csv::fmt(p) + seed};
    }
    if (m == 0) usage("--m is required for ba");
    return {gen_barabasi_albert(nodes, m, g_opts.seed),
            "ba:n=" + std::to_string(nodes) + ":m=" + std::to_string(m) + seed};
  }
};

// ---------------------------------------------------------------------------
// Pair inputs: --pair u,v or --pairs file with "u v" or "u,v" per line.

struct pair_source {
  std::string pair;
  std::string file;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--pair", pair, "single pair u,v");
    cmd->add_option("--pairs", file, "file of pairs, one 'u v' per line");
  }

  [[nodiscard]] std::vector<edge> resolve() const {
    if (pair.empty() == file.empty()) usage("give exactly one of --pair or --pairs");
    std::vector<edge> out;
    auto parse_line = [&](std::string line, std::size_t line_no) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      for (char& c : line)
        if (c == ',' || c == '\t') c = ' ';
      const auto toks = split(line, ' ');
      if (toks.empty() || toks[0][0] == '#') return;
      if (toks.size() != 2)
        throw error(errc::malformed_line, "pair line " + std::to_string(line_no) + ": expected two node ids");
      node_id ids[2];
      for (int i = 0; i < 2; ++i) {
        auto [ptr, ec] = std::from_chars(toks[i].data(), toks[i].data() + toks[i].size(), ids[i]);
        if (ec != std::errc() || ptr != toks[i].data() + toks[i].size())
          throw error(errc::malformed_line, "pair line " + std::to_string(line_no) + ": bad node id '" + toks[i] + "'");
      }
      out.emplace_back(ids[0], ids[1]);
    };
    if (!pair.empty()) {
      parse_line(pair, 1);
      if (out.size() != 1) usage("--pair expects u,v");
      return out;
    }
    std::ifstream in(file);
    if (!in) throw error(errc::io_error, "cannot open pairs file '" + file + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) parse_line(line, ++line_no);
    return out;
  }
};

void check_pair(std::size_t node_count, const edge& e) {
  if (e.first >= node_count || e.second >= node_count)
    throw error(errc::node_out_of_range, "pair (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                                             ") out of range for N=" + std::to_string(node_count));
}

std::string signature_path(const std::string& prefix, unsigned hop) {
  return prefix + ".hop" + std::to_string(hop) + ".bsg";
}

hash_family family_of(const family_fingerprint& fp) { return {fp.kind, fp.seed, fp.n}; }

weight_kind parse_weight(const std::string& s) {
  if (s == "unit") return weight_kind::unit;
  if (s == "ra" || s == "inverse_degree") return weight_kind::inverse_degree;
  if (s == "aa" || s == "inverse_log_degree") return weight_kind::inverse_log_degree;
  usage("unknown weight '" + s + "'");
}

set_op parse_op(const std::string& s) {
  if (s == "intersection") return set_op::intersection;
  if (s == "union") return set_op::union_;
  if (s == "difference") return set_op::difference;
  usage("unknown set operator '" + s + "'");
}

std::vector<method> parse_methods(const std::string& s) {
  std::vector<method> out;
  for (const auto& tok : split(s, ',')) {
    if (tok == "bloom") out.push_back(method::bloom);
    else if (tok == "minhash_hll") out.push_back(method::minhash_hll);
    else usage("unknown method '" + tok + "'");
  }
  if (out.empty()) usage("empty method list");
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

struct gen_cmd {
  std::vector<std::string> positional;
  std::string model;
  std::size_t nodes = 0;
  double p = -1.0;
  std::size_t m = 0;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen", "generate a random graph as an edge list");
    c->add_option("args", positional, "model nodes p|m (alternative to the flags)");
    c->add_option("--model", model)->check(CLI::IsMember({"er", "ba"}));
    c->add_option("--nodes", nodes);
    c->add_option("--p", p);
    c->add_option("--m", m);
    c->add_option("--out", out, "output path (default stdout)");
    c->callback([this] { run(); });
  }

  void run() {
    if (!positional.empty()) {
      if (positional.size() != 3) usage("gen expects: model nodes p|m");
      model = positional[0];
      nodes = parse_number<std::size_t>(positional[1], "node count");
      if (model == "er") p = std::stod(positional[2]);
      else if (model == "ba") m = parse_number<std::size_t>(positional[2], "m");
      else usage("unknown model '" + model + "'");
    }
    graph_source src;
    src.model = model;
    src.nodes = nodes;
    src.p = p;
    src.m = m;
    const auto [g, desc] = src.resolve();
    if (out.empty()) {
      write_edge_list(std::cout, g, desc);
    } else {
      std::ofstream f(out);
      if (!f) throw error(errc::io_error, "cannot open '" + out + "' for writing");
      write_edge_list(f, g, desc);
      if (!f) throw error(errc::io_error, "failed writing '" + out + "'");
    }
    note("generated " + desc + ": N=" + std::to_string(g.node_count()) + " E=" + std::to_string(g.edge_count()));
  }
};

struct build_cmd {
  std::string graph_path;
  unsigned hops = 1;
  std::uint64_t bits = 0;
  std::string out;
  std::string family = "avalanche";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("build", "build Bloom signatures for hops 1..k, one BSG1 file per hop");
    c->add_option("--graph", graph_path)->required();
    c->add_option("--hops", hops, "largest hop k")->check(CLI::Range(1u, 255u));
    c->add_option("--bits", bits, "signature length n (identity default: N)");
    c->add_option("--out", out, "output prefix")->required();
    c->add_option("--family", family)->check(CLI::IsMember({"avalanche", "identity"}));
    c->callback([this] { run(); });
  }

  void run() {
    const auto g = load_graph_file(graph_path);
    std::uint64_t n = bits;
    if (n == 0) {
      if (family != "identity") usage("--bits is required for the avalanche family");
      n = g.node_count();
    }
    const auto base = family == "identity" ? hash_family::identity(n) : hash_family::avalanche(g_opts.seed, n);
    for (unsigned k = 1; k <= hops; ++k) {
      const auto sigs = build_all(g, k, base.for_hop(k), thread_count());
      save_signatures(signature_path(out, k), sigs);
      note("wrote " + signature_path(out, k));
    }
  }
};

struct estimate_cmd {
  std::string prefix;
  unsigned hop = 1;
  pair_source pairs;
  std::string features = "cn,cosine,containment";
  bool clamp = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("estimate", "estimate pairwise features from stored signatures");
    c->add_option("--sigs", prefix, "signature prefix")->required();
    c->add_option("--hop", hop);
    pairs.add_options(c);
    c->add_option("--features", features, "comma list of cn,cosine,containment,card_u,card_v,inner");
    c->add_flag("--clamp-saturated", clamp, "treat full signatures as n-1 bits set");
    c->callback([this] { run(); });
  }

  void run() {
    const auto list = split(features, ',');
    for (const auto& f : list)
      if (f != "cn" && f != "cosine" && f != "containment" && f != "card_u" && f != "card_v" && f != "inner")
        usage("unknown feature '" + f + "'");
    if (list.empty()) usage("empty feature list");
    const auto todo = pairs.resolve();
    const auto sigs = load_signatures(signature_path(prefix, hop));
    const estimate_options opt{.clamp_saturated = clamp};

    std::cout << "u,v";
    for (const auto& f : list) std::cout << ',' << f;
    std::cout << '\n';
    for (const auto& e : todo) {
      check_pair(sigs.node_count(), e);
      const auto a = sigs[e.first];
      const auto b = sigs[e.second];
      std::cout << e.first << ',' << e.second;
      for (const auto& f : list) {
        std::string v;
        if (f == "cn") v = csv::fmt(estimate_intersection(a, b, opt));
        else if (f == "cosine") v = csv::fmt(estimate_cosine(a, b, opt));
        else if (f == "containment") v = csv::fmt(estimate_containment(a, b, opt));
        else if (f == "card_u") v = csv::fmt(estimate_cardinality(a, opt));
        else if (f == "card_v") v = csv::fmt(estimate_cardinality(b, opt));
        else v = csv::fmt(inner_product(a, b));
        std::cout << ',' << v;
      }
      std::cout << '\n';
    }
  }
};

struct heuristic_cmd {
  std::string graph_path;
  std::string preset_name_str;
  std::string op = "intersection";
  std::string weight = "unit";
  unsigned hop = 1;
  unsigned hop_a = 0;
  unsigned hop_b = 0;
  unsigned buddy = 0;
  pair_source pairs;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("heuristic", "exact pairwise heuristics by enumeration");
    c->add_option("--graph", graph_path)->required();
    c->add_option("name", preset_name_str, "preset: cn, ra, aa, jaccard, cosine, containment");
    c->add_option("--preset", preset_name_str);
    c->add_option("--op", op, "custom: intersection, union, difference");
    c->add_option("--weight", weight, "custom: unit, ra, aa");
    c->add_option("--hop", hop);
    c->add_option("--hop-a", hop_a);
    c->add_option("--hop-b", hop_b);
    c->add_option("--buddy", buddy, "emit k*k intersection and 2k difference counts for this k");
    pairs.add_options(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto g = load_graph_file(graph_path);
    const auto todo = pairs.resolve();
    if (buddy > 0) {
      std::cout << "u,v";
      for (unsigned a = 1; a <= buddy; ++a)
        for (unsigned b = 1; b <= buddy; ++b) std::cout << ",i" << a << '_' << b;
      for (unsigned d = 1; d <= buddy; ++d) std::cout << ",du" << d;
      for (unsigned d = 1; d <= buddy; ++d) std::cout << ",dv" << d;
      std::cout << '\n';
      for (const auto& e : todo) {
        const auto f = buddy_features(g, e.first, e.second, buddy);
        std::cout << e.first << ',' << e.second;
        for (auto x : f.intersections) std::cout << ',' << x;
        for (auto x : f.differences) std::cout << ',' << x;
        std::cout << '\n';
      }
      return;
    }

    heuristic_spec spec;
    std::string label;
    if (!preset_name_str.empty()) {
      const auto p = parse_preset(preset_name_str);
      if (!p) usage("unknown preset '" + preset_name_str + "'");
      spec = preset(*p, hop);
      label = preset_name_str;
    } else {
      spec.op = parse_op(op);
      spec.weight = parse_weight(weight);
      spec.hop_a = spec.hop_b = hop;
      label = "value";
    }
    if (hop_a) spec.hop_a = hop_a;
    if (hop_b) spec.hop_b = hop_b;
    if (spec.hop_a < 1 || spec.hop_b < 1) usage("hops must be >= 1");

    std::cout << "u,v," << label << '\n';
    for (const auto& e : todo) csv::row(std::cout, e.first, e.second, exact_pairwise(g, e.first, e.second, spec));
  }
};

struct recover_cmd {
  std::string graph_path;
  std::string prefix;
  unsigned hop = 1;
  std::string kind = "intersection";
  std::string weight = "unit";
  double delta = 0.05;
  pair_source pairs;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("recover", "evaluate a constructed recovery network on stored signatures");
    c->add_option("--graph", graph_path)->required();
    c->add_option("--sigs", prefix, "signature prefix")->required();
    c->add_option("--hop", hop);
    c->add_option("--kind", kind)->check(CLI::IsMember({"intersection", "union", "difference"}));
    c->add_option("--weight", weight, "unit, ra, aa");
    c->add_option("--delta", delta, "failure probability for the bound column");
    pairs.add_options(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto g = load_graph_file(graph_path);
    const auto todo = pairs.resolve();
    const auto sigs = load_signatures(signature_path(prefix, hop));
    if (sigs.node_count() != g.node_count())
      throw error(errc::bad_format, "signature file has N=" + std::to_string(sigs.node_count()) +
                                        " but the graph has N=" + std::to_string(g.node_count()));
    if (!(delta > 0.0 && delta < 1.0)) usage("--delta must lie in (0, 1)");

    const network_kind nk = kind == "union" ? network_kind::union_
                            : kind == "difference" ? network_kind::difference
                                                   : network_kind::intersection;
    heuristic_spec spec;
    spec.op = parse_op(kind);
    spec.weight = parse_weight(weight);
    spec.hop_a = spec.hop_b = hop;
    const auto net = construct_network(g, spec, family_of(sigs.fingerprint()), nk);

    // Exact value with the same node weights the network uses.
    heuristic_spec exact_spec = spec;
    exact_spec.weight = weight_kind::table;
    exact_spec.weight_table = net.node_weights();

    std::cout << "u,v,output,exact";
    if (nk == network_kind::intersection) std::cout << ",bound";
    std::cout << '\n';
    for (const auto& e : todo) {
      check_pair(g.node_count(), e);
      const double out = evaluate(net, sigs[e.first], sigs[e.second]);
      const double exact = exact_pairwise(g, e.first, e.second, exact_spec);
      std::cout << e.first << ',' << e.second << ',' << csv::fmt(out) << ',' << csv::fmt(exact);
      if (nk == network_kind::intersection) {
        const auto part = partition_sets(g, e.first, e.second, hop);
        const partition_sizes sizes{part.complement.size(), part.only_u.size(), part.only_v.size()};
        const auto cu = k_hop_neighborhood(g, e.first, hop).size();
        const auto cv = k_hop_neighborhood(g, e.second, hop).size();
        std::cout << ',' << csv::fmt(theorem2_bound(sizes, cu, cv, sigs.size(), net.max_weight(), delta));
      }
      std::cout << '\n';
    }
  }
};

struct eval_mae_cmd {
  graph_source src;
  std::string hops = "1,2";
  std::string budgets = "4096,8192,16384,32768,65536";
  std::string methods = "bloom,minhash_hll";
  std::size_t num_pairs = 2000;
  std::string seeds;
  double delta = 0.05;
  std::string dump;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("eval-mae", "intersection MAE against memory budget, CSV to stdout");
    src.add_options(c);
    c->add_option("--hops", hops);
    c->add_option("--budgets", budgets, "comma list of budgets in bits");
    c->add_option("--methods", methods, "comma list of bloom, minhash_hll");
    c->add_option("--num-pairs", num_pairs);
    c->add_option("--seeds", seeds, "comma list (default: --seed)");
    c->add_option("--delta", delta);
    c->add_option("--dump", dump, "write per-pair errors to this CSV file");
    c->callback([this] { run(); });
  }

  void run() {
    sweep_config cfg;
    cfg.hops = parse_list<unsigned>(hops, "hop");
    cfg.budgets_bits = parse_list<std::uint64_t>(budgets, "budget");
    cfg.methods = parse_methods(methods);
    cfg.num_pairs = num_pairs;
    cfg.seeds = seeds.empty() ? std::vector<std::uint64_t>{g_opts.seed} : parse_list<std::uint64_t>(seeds, "seed");
    cfg.delta = delta;
    cfg.threads = thread_count();
    cfg.validate();
    const auto [g, desc] = src.resolve();
    cfg.graph_desc = desc;

    std::vector<pair_error> errors;
    const auto rows = run_mae_sweep(g, cfg, dump.empty() ? nullptr : &errors);
    write_report_csv(std::cout, rows);
    if (!dump.empty()) {
      std::ofstream f(dump);
      if (!f) throw error(errc::io_error, "cannot open '" + dump + "' for writing");
      f << "method,hop,budget_bits,seed,u,v,exact,estimate\n";
      for (const auto& e : errors)
        csv::row(f, to_string(e.meth), e.hop, e.budget_bits, e.seed, e.u, e.v, e.exact, e.estimate);
    }
  }
};

struct verify_bounds_cmd {
  graph_source src;
  coverage_config cfg;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify-bounds", "Monte Carlo coverage of the error bounds; exit 1 on failure");
    src.add_options(c);
    src.set_default("er", 1000, 0.01, 0);
    c->add_option("--hop", cfg.hop);
    c->add_option("--bits", cfg.bits);
    c->add_option("--delta", cfg.delta);
    c->add_option("--trials", cfg.trials);
    c->callback([this] { run(); });
  }

  void run() {
    cfg.seed = g_opts.seed;
    cfg.threads = thread_count();
    const auto [g, desc] = src.resolve();
    note("coverage on " + desc);
    const auto rows = run_bound_coverage(g, cfg);
    write_coverage_csv(std::cout, rows);
    for (const auto& r : rows)
      if (!r.pass) throw check_failed(r.bound + " violation rate " + csv::fmt(r.rate) + " exceeds " + csv::fmt(r.allowed));
  }
};

struct bench_cmd {
  graph_source src;
  throughput_config cfg;
  std::string thread_list = "1";
  std::string methods = "bloom,minhash_hll";

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("bench", "merge+estimate throughput over prebuilt encodings");
    src.add_options(c);
    src.set_default("er", 100000, 1e-4, 0);
    c->add_option("--num-pairs", cfg.pairs);
    c->add_option("--thread-list", thread_list, "comma list of worker counts");
    c->add_option("--budget", cfg.budget_bits);
    c->add_option("--hop", cfg.hop);
    c->add_option("--reps", cfg.repetitions);
    c->add_option("--methods", methods);
    c->callback([this] { run(); });
  }

  void run() {
    cfg.thread_counts = parse_list<unsigned>(thread_list, "thread count");
    cfg.methods = parse_methods(methods);
    cfg.seed = g_opts.seed;
    cfg.build_threads = thread_count();
    if (cfg.budget_bits < 64) usage("--budget must be >= 64");
    const auto [g, desc] = src.resolve();
    note("throughput on " + desc);
    const auto enc = prebuild(g, cfg);
    write_throughput_csv(std::cout, run_throughput(enc, g.node_count(), cfg));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloom signatures for graph neighborhoods"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", g_opts.seed, "global seed")->capture_default_str();
  app.add_option("--threads", g_opts.threads, "worker count (default BSIG_THREADS or all cores)");
  app.add_flag("--quiet", g_opts.quiet, "no diagnostics on stderr");

  gen_cmd gen;
  build_cmd build;
  estimate_cmd estimate;
  heuristic_cmd heuristic;
  recover_cmd recover;
  eval_mae_cmd eval_mae;
  verify_bounds_cmd verify;
  bench_cmd bench;
  gen.add(app);
  build.add(app);
  estimate.add(app);
  heuristic.add(app);
  recover.add(app);
  eval_mae.add(app);
  verify.add(app);
  bench.add(app);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const check_failed& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kFailed;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
