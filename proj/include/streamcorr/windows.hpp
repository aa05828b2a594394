#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "streamcorr/edge.hpp"
#include "streamcorr/rng.hpp"

namespace streamcorr {

// Sliding-window layout: window i (i >= 1) closes at t_i = tau + lambda*(i-1)
// and covers the closed interval [t_i - tau, t_i]. Consecutive windows overlap
// by a fraction 1 - lambda/tau.
struct WindowConfig {
  double tau = 60.0;
  double lambda = 30.0;
  std::size_t k = 400;

  void validate() const;  // throws std::invalid_argument
  double close_time(long i) const { return tau + lambda * (i - 1); }
  double open_time(long i) const { return lambda * (i - 1); }
};

// All window indices whose interval contains `timestamp`. Both interval ends
// are inclusive, so an edge on a shared boundary lands in every window that
// touches it.
std::vector<long> windows_for(double timestamp, const WindowConfig& cfg);

// Fixed-capacity uniform sample of one window's edges. After m offers each
// offered edge is present with probability k/max(k,m).
class WindowReservoir {
 public:
  WindowReservoir(long index, const WindowConfig& cfg, std::uint64_t rng_seed);

  long index() const { return index_; }
  double open_time() const { return open_; }
  double close_time() const { return close_; }
  std::size_t seen() const { return seen_; }
  bool closed() const { return closed_; }
  const std::vector<TimedEdge>& samples() const { return samples_; }

  // Throws std::range_error when the edge is outside the window interval and
  // std::logic_error after close().
  void offer(const TimedEdge& edge);

  // Freezes the reservoir and returns (final sample, m). Second close throws.
  std::pair<std::vector<TimedEdge>, std::size_t> close();

 private:
  long index_;
  double open_;
  double close_;
  std::size_t k_;
  std::size_t seen_ = 0;
  bool closed_ = false;
  std::vector<TimedEdge> samples_;
  Rng rng_;
};

}  // namespace streamcorr
