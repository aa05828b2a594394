#pragma once

#include <string>

namespace streamcorr {

// One stream event. Edges are undirected; self-loops and repeats are allowed.
struct TimedEdge {
  double ts = 0.0;
  std::string src;
  std::string dst;

  bool operator==(const TimedEdge&) const = default;
};

}  // namespace streamcorr
