#include "nkmatch/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "nkmatch/error.hpp"

namespace nkmatch {

Graph::Graph(std::size_t n, std::vector<Edge> edges, std::vector<Label> labels) {
  for (auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InvariantError("edge endpoint out of range");
    }
    if (e.u == e.v) {
      throw InvariantError("self-loop on node " + std::to_string(e.u));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InvariantError("duplicate edge");
  }
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  targets_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    targets_[fill[e.u]++] = e.v;
    targets_[fill[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }

  if (labels.empty()) {
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i);
  }
  if (labels.size() != n) {
    throw InvariantError("label table size does not match node count");
  }
  labels_ = std::move(labels);
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(labels_[i], static_cast<NodeId>(i)).second) {
      throw InvariantError("duplicate node label " + std::to_string(labels_[i]));
    }
  }
}

void Graph::check_node(NodeId a) const {
  if (a >= node_count()) {
    throw std::out_of_range("node id " + std::to_string(a) + " out of range (n=" +
                            std::to_string(node_count()) + ")");
  }
}

std::span<const NodeId> Graph::neighbors(NodeId a) const {
  check_node(a);
  return {targets_.data() + offsets_[a], offsets_[a + 1] - offsets_[a]};
}

std::size_t Graph::degree(NodeId a) const {
  check_node(a);
  return offsets_[a + 1] - offsets_[a];
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  auto nb = neighbors(u);
  check_node(v);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Label Graph::label(NodeId a) const {
  check_node(a);
  return labels_[a];
}

std::optional<NodeId> Graph::find_label(Label l) const {
  auto it = index_.find(l);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> k_hop_frontier(const Graph& g, NodeId a, int k) {
  if (k != 1 && k != 2) {
    throw UsageError("k_hop_frontier supports k in {1,2}, got " + std::to_string(k));
  }
  auto first = g.neighbors(a);
  if (k == 1) return {first.begin(), first.end()};

  std::vector<NodeId> out;
  for (NodeId b : first) {
    for (NodeId c : g.neighbors(b)) {
      if (c != a && !std::binary_search(first.begin(), first.end(), c)) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Graph permute_nodes(const Graph& g, std::span<const NodeId> perm) {
  const std::size_t n = g.node_count();
  if (perm.size() != n) throw UsageError("permutation size does not match node count");
  std::vector<char> seen(n, 0);
  for (NodeId p : perm) {
    if (p >= n || seen[p]) throw UsageError("not a permutation");
    seen[p] = 1;
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[perm[i]] = g.labels()[i];
  return Graph(n, std::move(edges), std::move(labels));
}

Graph relabel(const Graph& g, std::vector<Label> labels) {
  return Graph(g.node_count(), g.edges(), std::move(labels));
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep) {
  constexpr NodeId kAbsent = static_cast<NodeId>(-1);
  std::vector<NodeId> remap(g.node_count(), kAbsent);
  std::vector<Label> labels;
  labels.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (remap[keep[i]] != kAbsent) throw UsageError("duplicate node in subgraph selection");
    remap[keep[i]] = static_cast<NodeId>(i);
    labels.push_back(g.label(keep[i]));
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (remap[e.u] != kAbsent && remap[e.v] != kAbsent) edges.push_back({remap[e.u], remap[e.v]});
  }
  return Graph(keep.size(), std::move(edges), std::move(labels));
}

namespace {

bool parse_label(std::string_view tok, Label& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace

LoadedGraph parse_edge_list(std::istream& in, EdgeListDialect dialect) {
  const char comment = dialect == EdgeListDialect::snap ? '#' : '%';
  std::vector<std::pair<Label, Label>> raw;
  std::vector<Label> loop_nodes;  // kept as nodes even though the edge is dropped
  LoadedGraph result;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == comment) continue;

    std::istringstream fields(line.substr(start));
    std::string a, b;
    Label u = 0, v = 0;
    if (!(fields >> a >> b) || !parse_label(a, u) || !parse_label(b, v)) {
      throw InputError("malformed edge at line " + std::to_string(lineno) + ": '" + line + "'");
    }
    if (u == v) {
      ++result.self_loops_dropped;
      loop_nodes.push_back(u);
      continue;
    }
    raw.emplace_back(std::min(u, v), std::max(u, v));
  }
  if (in.bad()) throw InputError("read error after line " + std::to_string(lineno));

  std::sort(raw.begin(), raw.end());
  auto last = std::unique(raw.begin(), raw.end());
  result.duplicates_dropped = static_cast<std::size_t>(raw.end() - last);
  raw.erase(last, raw.end());

  std::vector<Label> labels;
  labels.reserve(raw.size() * 2 + loop_nodes.size());
  labels.insert(labels.end(), loop_nodes.begin(), loop_nodes.end());
  for (const auto& [u, v] : raw) {
    labels.push_back(u);
    labels.push_back(v);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  auto id_of = [&](Label l) {
    return static_cast<NodeId>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.push_back({id_of(u), id_of(v)});

  const std::size_t n = labels.size();
  result.graph = Graph(n, std::move(edges), std::move(labels));
  return result;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeListDialect dialect) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path.string() + "'");
  return parse_edge_list(in, dialect);
}

std::vector<std::pair<Label, Label>> labeled_edges(const Graph& g) {
  std::vector<std::pair<Label, Label>> out;
  out.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    Label a = g.labels()[e.u], b = g.labels()[e.v];
    out.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  for (const auto& [u, v] : labeled_edges(g)) out << u << ' ' << v << '\n';
}

void write_edge_list(const std::filesystem::path& path, const Graph& g,
                     const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_edge_list(out, g, header);
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

}  // namespace nkmatch
