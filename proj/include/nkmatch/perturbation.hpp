#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nkmatch/graph.hpp"

namespace nkmatch {

struct NoiseSpec {
  double noise = 0.0;  // r / M
  std::uint64_t seed = 0;
};

struct OverlapSpec {
  double overlap = 1.0;  // fraction of nodes shared by both samples
  std::uint64_t seed = 0;
};

// (anon label, aux label) pairs known to be the same individual.
using GroundTruth = std::vector<std::pair<Label, Label>>;

// r = round(noise * M).
std::size_t altered_edge_count(const Graph& g, double noise);

// Deletes r uniformly chosen edges, then inserts r uniformly chosen pairs that
// were absent from the input. Node set, labels and M are unchanged.
Graph perturb(const Graph& g, const NoiseSpec& spec);

struct OverlappingPair {
  Graph first;
  Graph second;
  GroundTruth truth;  // identity on the shared labels
};

// Shared set of round(beta*n) nodes plus disjoint private halves of the rest;
// with an odd remainder the extra node goes to `first`.
OverlappingPair generate_overlapping_pair(const Graph& g, const OverlapSpec& spec);

struct Anonymized {
  Graph graph;        // labels 0..n-1 assigned by a random permutation
  GroundTruth truth;  // new label -> original label
};

// Strip identities: randomly permute node ids and label nodes by new id.
Anonymized anonymize(const Graph& g, std::uint64_t seed);

// Throws InputError unless truth is one-to-one in both columns.
void check_bijection(const GroundTruth& truth);

// Composes anon->mid with mid->aux, keeping pairs present in both.
GroundTruth compose(const GroundTruth& first, const GroundTruth& second);

// Two-column TSV "anon_label\taux_label"; '#' lines are comments.
void write_truth_tsv(std::ostream& out, const GroundTruth& truth,
                     const std::vector<std::string>& header = {});
GroundTruth read_truth_tsv(const std::filesystem::path& path);

enum class GraphModel { erdos_renyi, barabasi_albert, watts_strogatz };

struct GeneratorParams {
  std::size_t n = 0;
  double p = 0.0;          // ER edge probability
  std::size_t m = 3;       // BA edges per new node
  std::size_t k = 4;       // WS ring degree (even)
  double beta = 0.1;       // WS rewiring probability
};

GraphModel parse_graph_model(const std::string& name);
std::string to_string(GraphModel model);

// ER: G(n,p). BA: seed clique on m nodes, each later node attaches to m
// distinct nodes by degree (M = C(m,2) + (n-m)m). WS: ring lattice of degree
// k, each edge's far endpoint rewired with probability beta.
Graph generate_synthetic(GraphModel model, const GeneratorParams& params, std::uint64_t seed);

}  // namespace nkmatch
