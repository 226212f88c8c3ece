#include "nkmatch/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "nkmatch/error.hpp"
#include "nkmatch/rng.hpp"

namespace nkmatch {

namespace {

std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

std::uint64_t pair_count(std::size_t n) {
  return static_cast<std::uint64_t>(n) * (n == 0 ? 0 : n - 1) / 2;
}

}  // namespace

std::size_t altered_edge_count(const Graph& g, double noise) {
  if (!(noise >= 0.0 && noise <= 1.0)) throw UsageError("noise must lie in [0, 1]");
  return static_cast<std::size_t>(std::llround(noise * static_cast<double>(g.edge_count())));
}

Graph perturb(const Graph& g, const NoiseSpec& spec) {
  const std::size_t r = altered_edge_count(g, spec.noise);
  const std::size_t n = g.node_count();
  const std::uint64_t total_pairs = pair_count(n);
  const std::uint64_t insertable = total_pairs - g.edge_count();
  if (insertable < r) {
    throw InputError("cannot insert " + std::to_string(r) + " new edges: only " +
                     std::to_string(insertable) + " absent pairs");
  }
  if (r == 0) return g;

  Rng rng(spec.seed);
  std::vector<Edge> edges = g.edges();
  rng.partial_shuffle(edges, r);
  std::vector<Edge> kept(edges.begin() + static_cast<std::ptrdiff_t>(r), edges.end());

  // Original edges, deleted ones included, are never eligible for insertion.
  std::unordered_set<std::uint64_t> taken;
  taken.reserve(g.edge_count() + r);
  for (const auto& e : g.edges()) taken.insert(pair_key(e.u, e.v));

  if (4 * insertable >= total_pairs) {
    while (kept.size() < g.edge_count()) {
      const auto u = static_cast<NodeId>(rng.below(n));
      auto v = static_cast<NodeId>(rng.below(n - 1));
      if (v >= u) ++v;
      if (taken.insert(pair_key(u, v)).second) kept.push_back({std::min(u, v), std::max(u, v)});
    }
  } else {
    // Dense graph: enumerate the absent pairs and sample r of them.
    std::vector<Edge> absent;
    absent.reserve(insertable);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (!taken.contains(pair_key(u, v))) absent.push_back({u, v});
      }
    }
    rng.partial_shuffle(absent, r);
    kept.insert(kept.end(), absent.begin(), absent.begin() + static_cast<std::ptrdiff_t>(r));
  }
  return Graph(n, std::move(kept), g.labels());
}

OverlappingPair generate_overlapping_pair(const Graph& g, const OverlapSpec& spec) {
  if (!(spec.overlap > 0.0 && spec.overlap <= 1.0)) throw UsageError("overlap must lie in (0, 1]");
  const std::size_t n = g.node_count();
  if (n < 2) throw InputError("overlap sampling needs at least 2 nodes");

  const auto shared =
      static_cast<std::size_t>(std::llround(spec.overlap * static_cast<double>(n)));
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(spec.seed);
  rng.shuffle(order);

  const std::size_t rest = n - shared;
  const std::size_t first_private = rest - rest / 2;
  std::vector<NodeId> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shared + first_private));
  std::vector<NodeId> second(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shared));
  second.insert(second.end(), order.begin() + static_cast<std::ptrdiff_t>(shared + first_private), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());

  OverlappingPair out{induced_subgraph(g, first), induced_subgraph(g, second), {}};
  std::vector<NodeId> common(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shared));
  std::sort(common.begin(), common.end());
  for (NodeId a : common) out.truth.emplace_back(g.label(a), g.label(a));
  return out;
}

Anonymized anonymize(const Graph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), NodeId{0});
  Rng rng(seed);
  rng.shuffle(perm);

  Graph moved = permute_nodes(g, perm);
  Anonymized out;
  out.truth.reserve(n);
  std::vector<Label> fresh(n);
  for (std::size_t i = 0; i < n; ++i) {
    fresh[i] = static_cast<Label>(i);
    out.truth.emplace_back(static_cast<Label>(i), moved.labels()[i]);
  }
  out.graph = relabel(moved, std::move(fresh));
  return out;
}

void check_bijection(const GroundTruth& truth) {
  std::unordered_set<Label> left, right;
  for (const auto& [a, b] : truth) {
    if (!left.insert(a).second) throw InputError("ground truth repeats anon label " + std::to_string(a));
    if (!right.insert(b).second) throw InputError("ground truth repeats aux label " + std::to_string(b));
  }
}

GroundTruth compose(const GroundTruth& first, const GroundTruth& second) {
  std::unordered_map<Label, Label> hop;
  for (const auto& [a, b] : second) hop.emplace(a, b);
  GroundTruth out;
  for (const auto& [a, b] : first) {
    if (auto it = hop.find(b); it != hop.end()) out.emplace_back(a, it->second);
  }
  return out;
}

void write_truth_tsv(std::ostream& out, const GroundTruth& truth, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "# anon_label\taux_label\n";
  for (const auto& [a, b] : truth) out << a << '\t' << b << '\n';
}

GroundTruth read_truth_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ground truth '" + path.string() + "'");
  GroundTruth out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Label a = 0, b = 0;
    if (!(fields >> a >> b)) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected two labels");
    }
    out.emplace_back(a, b);
  }
  check_bijection(out);
  return out;
}

GraphModel parse_graph_model(const std::string& name) {
  if (name == "er" || name == "erdos-renyi") return GraphModel::erdos_renyi;
  if (name == "ba" || name == "barabasi-albert") return GraphModel::barabasi_albert;
  if (name == "ws" || name == "watts-strogatz") return GraphModel::watts_strogatz;
  throw UsageError("unknown graph model '" + name + "' (expected er, ba or ws)");
}

std::string to_string(GraphModel model) {
  switch (model) {
    case GraphModel::erdos_renyi: return "erdos-renyi";
    case GraphModel::barabasi_albert: return "barabasi-albert";
    case GraphModel::watts_strogatz: return "watts-strogatz";
  }
  return "unknown";
}

namespace {

Graph erdos_renyi(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("ER edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  if (p == 0.0 || n < 2) return Graph(n, {});
  if (p == 1.0) {
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
    return Graph(n, std::move(edges));
  }
  // Geometric skipping over the lower triangle (Batagelj & Brandes).
  const double log_q = std::log(1.0 - p);
  std::int64_t v = 1, w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = rng.uniform();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log(1.0 - r) / log_q));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
  }
  return Graph(n, std::move(edges));
}

Graph barabasi_albert(std::size_t n, std::size_t m, Rng& rng) {
  if (m < 1) throw UsageError("BA attachment count m must be >= 1");
  if (n <= m) throw UsageError("BA requires n > m");
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;  // each node repeated degree times
  for (NodeId u = 0; u < m; ++u) {
    for (NodeId v = u + 1; v < m; ++v) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::vector<NodeId> targets;
  for (NodeId fresh = static_cast<NodeId>(m); fresh < n; ++fresh) {
    targets.clear();
    if (fresh == m) {
      for (NodeId u = 0; u < m; ++u) targets.push_back(u);
    } else {
      while (targets.size() < m) {
        const NodeId t = endpoints[rng.below(endpoints.size())];
        if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      edges.push_back({t, fresh});
      endpoints.push_back(t);
      endpoints.push_back(fresh);
    }
  }
  return Graph(n, std::move(edges));
}

Graph watts_strogatz(std::size_t n, std::size_t k, double beta, Rng& rng) {
  if (k % 2 != 0 || k == 0) throw UsageError("WS ring degree k must be even and positive");
  if (k >= n) throw UsageError("WS requires k < n");
  if (!(beta >= 0.0 && beta <= 1.0)) throw UsageError("WS rewiring probability must lie in [0, 1]");

  std::set<std::uint64_t> present;
  std::vector<Edge> ring;
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= k / 2; ++j) {
      const auto v = static_cast<NodeId>((u + j) % n);
      ring.push_back({u, v});
      present.insert(pair_key(u, v));
    }
  }
  std::vector<std::size_t> degree(n, k);
  for (auto& e : ring) {
    if (!rng.bernoulli(beta) || degree[e.u] >= n - 1) continue;
    NodeId w;
    do {
      w = static_cast<NodeId>(rng.below(n));
    } while (w == e.u || present.contains(pair_key(e.u, w)));
    present.erase(pair_key(e.u, e.v));
    present.insert(pair_key(e.u, w));
    --degree[e.v];
    ++degree[w];
    e.v = w;
  }
  return Graph(n, std::move(ring));
}

}  // namespace

Graph generate_synthetic(GraphModel model, const GeneratorParams& params, std::uint64_t seed) {
  Rng rng(seed);
  switch (model) {
    case GraphModel::erdos_renyi: return erdos_renyi(params.n, params.p, rng);
    case GraphModel::barabasi_albert: return barabasi_albert(params.n, params.m, rng);
    case GraphModel::watts_strogatz: return watts_strogatz(params.n, params.k, params.beta, rng);
  }
  throw UsageError("unknown graph model");
}

}  // namespace nkmatch
