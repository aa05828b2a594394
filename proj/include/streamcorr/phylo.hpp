#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "streamcorr/correlation.hpp"

namespace streamcorr {

// Unrooted tree with valued edges; every stream is exactly one leaf.
// Internal nodes carry an empty label.
struct PhyloTree {
  struct Node {
    std::string label;                          // empty for internal nodes
    std::vector<std::pair<int, double>> nbrs;   // (node index, edge length)
  };

  std::vector<Node> nodes;

  bool is_leaf(int v) const { return !nodes[static_cast<std::size_t>(v)].label.empty(); }
  std::vector<int> leaves() const;
  int leaf_index(const std::string& label) const;  // -1 when absent

  // Sum of edge lengths on the unique path between two nodes.
  double path_length(int a, int b) const;

  // Longest leaf-to-leaf path length.
  double diameter() const;

  void validate() const;  // throws std::invalid_argument on broken invariants
};

// d(i,j) = 1 - A(i,j). The matrix must be symmetric with unit diagonal and
// entries in [0,1]; anything else is rejected.
std::vector<std::vector<double>> distance_from_correlation(const CorrelationMatrix& A);

// Standard Neighbor Joining (Q-criterion agglomeration). Additive input
// metrics are reconstructed exactly. Negative branch lengths are clamped to
// zero with the deficit moved to the sibling branch. n=1 and n=2 degenerate
// to a point and a single edge.
PhyloTree neighbor_joining(const std::vector<std::string>& taxa,
                           const std::vector<std::vector<double>>& d);

// Multiset of canonical depth-k subtree signatures, one per node, computed on
// the tree rooted at its centroid (a virtual root splits the central edge
// when the centroid is an edge). Isomorphic labeled trees yield equal
// profiles.
std::map<std::string, long> kgram_profile(const PhyloTree& tree, int k);

// Tree edit distance with moves, approximated by half the L1 distance
// between k-gram profiles, rounded up. Zero iff the profiles coincide.
long tree_move_distance(const PhyloTree& a, const PhyloTree& b, int k = 2);

// Leaf-to-leaf path length normalized by the tree diameter; in [0,1].
double leaf_distance(const PhyloTree& tree, const std::string& a,
                     const std::string& b);

// Newick serialization. Trees parsed back from this form compare equal under
// kgram_profile. Unlabeled degree-2 nodes (rooted-form artifacts) are spliced
// out on parse; a missing branch length reads as 1.
std::string to_newick(const PhyloTree& tree);
PhyloTree parse_newick(const std::string& text);

}  // namespace streamcorr
