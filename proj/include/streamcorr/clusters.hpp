#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "streamcorr/edge.hpp"

namespace streamcorr {

struct ClusterParams {
  double gamma = 0.8;   // density parameter of the cluster definition
  int alpha = 10;       // acceptance threshold on the largest component
  int min_store = 10;   // smallest component worth storing

  void validate() const;  // throws std::invalid_argument

  // max(min_store, ceil(ln n)) for an n-node universe.
  static int default_alpha(std::size_t n, int min_store = 10);
};

// A stored large connected component. Degrees are multigraph degrees inside
// the component; the name is its highest-degree member.
struct Cluster {
  std::string stream;
  long window_index = 0;
  double timestamp = 0.0;
  std::string name;
  std::vector<std::pair<std::string, int>> members;  // sorted: degree desc, tag asc

  std::vector<std::string> high_degree(std::size_t top = 5) const;
  bool contains(const std::string& tag) const;
};

// One connected component of an edge multiset: members with their multigraph
// degrees (self-loops count 2), sorted by degree desc then tag asc.
struct Component {
  std::vector<std::pair<std::string, int>> members;

  std::size_t size() const { return members.size(); }
  const std::string& top_tag() const { return members.front().first; }
};

enum class Decision { Accept, Reject };

// Maximal connected components of the edge multiset, largest first.
std::vector<Component> connected_components(const std::vector<TimedEdge>& edges);

// Accept iff the largest component of the closed reservoir has >= alpha nodes.
Decision detect_static(const std::vector<TimedEdge>& closed_samples,
                       const ClusterParams& params);

// Accept iff any window's closed reservoir accepts statically (the eventually
// operator over the window sequence).
Decision detect_dynamic(const std::vector<std::vector<TimedEdge>>& closed_windows,
                        const ClusterParams& params);

// One Cluster per component of size >= min_store; possibly none.
std::vector<Cluster> extract_large(const std::vector<TimedEdge>& closed_samples,
                                   const ClusterParams& params,
                                   const std::string& stream, long window_index,
                                   double t_i);

}  // namespace streamcorr
