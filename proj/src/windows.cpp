#include "streamcorr/windows.hpp"

#include <cmath>
#include <stdexcept>

namespace streamcorr {

void WindowConfig::validate() const {
  if (!(lambda > 0.0) || !(tau > lambda))
    throw std::invalid_argument("window config: need 0 < lambda < tau");
  if (k < 1) throw std::invalid_argument("window config: k must be >= 1");
}

std::vector<long> windows_for(double timestamp, const WindowConfig& cfg) {
  cfg.validate();
  if (timestamp < 0.0)
    throw std::invalid_argument("windows_for: negative timestamp");

  // i ranges over t_i - tau <= ts <= t_i with t_i = tau + lambda*(i-1).
  // The epsilon absorbs float error at exact window boundaries.
  const double eps = 1e-9;
  long hi = static_cast<long>(std::floor(timestamp / cfg.lambda + eps)) + 1;
  long lo = static_cast<long>(std::ceil((timestamp - cfg.tau) / cfg.lambda - eps)) + 1;
  if (lo < 1) lo = 1;

  std::vector<long> ids;
  for (long i = lo; i <= hi; ++i) ids.push_back(i);
  return ids;
}

WindowReservoir::WindowReservoir(long index, const WindowConfig& cfg,
                                 std::uint64_t rng_seed)
    : index_(index),
      open_(cfg.open_time(index)),
      close_(cfg.close_time(index)),
      k_(cfg.k),
      rng_(Rng::derive(rng_seed, 0xA110C + static_cast<std::uint64_t>(index))) {
  cfg.validate();
  if (index < 1) throw std::invalid_argument("reservoir: window index must be >= 1");
  samples_.reserve(k_);
}

void WindowReservoir::offer(const TimedEdge& edge) {
  if (closed_) throw std::logic_error("reservoir: offer after close");
  const double eps = 1e-9;
  if (edge.ts < open_ - eps || edge.ts > close_ + eps)
    throw std::range_error("reservoir: edge outside the window interval");

  ++seen_;
  if (samples_.size() < k_) {
    samples_.push_back(edge);
    return;
  }
  // Keep with probability k/m, evicting a uniform resident.
  if (rng_.below(seen_) < k_) samples_[rng_.below(k_)] = edge;
}

std::pair<std::vector<TimedEdge>, std::size_t> WindowReservoir::close() {
  if (closed_) throw std::logic_error("reservoir: double close");
  closed_ = true;
  return {samples_, seen_};
}

}  // namespace streamcorr
