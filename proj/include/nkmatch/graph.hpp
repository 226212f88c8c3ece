#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nkmatch {

using NodeId = std::uint32_t;
using Label = std::int64_t;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected simple graph over dense ids 0..n-1, stored as CSR with sorted
// neighbor lists. Each node carries an external label used for file I/O and
// for comparing graphs that share an id universe.
class Graph {
 public:
  Graph() = default;

  // Edges may appear in either orientation. Throws InvariantError on
  // self-loops, duplicate edges or out-of-range endpoints. When `labels` is
  // empty, node i is labeled i.
  Graph(std::size_t n, std::vector<Edge> edges, std::vector<Label> labels = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId a) const;
  std::size_t degree(NodeId a) const;
  bool has_edge(NodeId u, NodeId v) const;

  // Canonical edge list: u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }

  Label label(NodeId a) const;
  const std::vector<Label>& labels() const { return labels_; }
  std::optional<NodeId> find_label(Label l) const;

 private:
  void check_node(NodeId a) const;

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<Edge> edges_;
  std::vector<Label> labels_;
  std::unordered_map<Label, NodeId> index_;
};

// Nodes at shortest-path distance exactly k from a, sorted. k must be 1 or 2.
std::vector<NodeId> k_hop_frontier(const Graph& g, NodeId a, int k);

// Node a of g becomes node perm[a] of the result, taking its label along.
Graph permute_nodes(const Graph& g, std::span<const NodeId> perm);

// Same structure, new labels (must be distinct, one per node).
Graph relabel(const Graph& g, std::vector<Label> labels);

// Subgraph induced by `keep` (ids of g); node keep[i] becomes node i.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep);

enum class EdgeListDialect {
  snap,    // '#' comments
  konect,  // '%' comments
};

struct LoadedGraph {
  Graph graph;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

// Ids are compacted in ascending label order. Accepts any whitespace between
// the two tokens; extra tokens after the first two (weights, timestamps) are
// ignored. Edges are symmetrized.
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           EdgeListDialect dialect = EdgeListDialect::snap);
LoadedGraph parse_edge_list(std::istream& in, EdgeListDialect dialect = EdgeListDialect::snap);

// Writes "u v" per edge in original labels with u < v, sorted. `header`
// lines are emitted first, each prefixed with "# ".
void write_edge_list(std::ostream& out, const Graph& g,
                     const std::vector<std::string>& header = {});
void write_edge_list(const std::filesystem::path& path, const Graph& g,
                     const std::vector<std::string>& header = {});

// Edge set in label space, each pair ordered (min, max), sorted.
std::vector<std::pair<Label, Label>> labeled_edges(const Graph& g);

}  // namespace nkmatch
