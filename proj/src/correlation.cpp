#include "streamcorr/correlation.hpp"

#include <cstdio>
#include <stdexcept>

namespace streamcorr {

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t inter = 0;
  for (const auto& x : small)
    if (large.count(x)) ++inter;
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

void rho_step(CorrelationState& state, const std::vector<std::string>& new1,
              const std::vector<std::string>& new2, double t) {
  long long d_inter = 0;
  long long d_union = 0;

  for (const auto& x : new1) {
    if (!state.c1.insert(x).second) continue;  // already accumulated
    if (state.c2.count(x)) ++d_inter;          // union size unchanged
    else ++d_union;
  }
  for (const auto& x : new2) {
    if (!state.c2.insert(x).second) continue;
    if (state.c1.count(x)) ++d_inter;
    else ++d_union;
  }

  state.I += d_inter;
  state.U += d_union;
  state.history.emplace_back(t, state.rho());
}

std::vector<std::pair<double, double>> rho_averaged(
    const std::vector<std::pair<double, double>>& history) {
  std::vector<std::pair<double, double>> out;
  if (history.size() < 3) return out;
  for (std::size_t i = 1; i + 1 < history.size(); ++i) {
    double avg = (history[i - 1].second + history[i].second + history[i + 1].second) / 3.0;
    out.emplace_back(history[i].first, avg);
  }
  return out;
}

std::string CorrelationMatrix::to_text() const {
  std::string out = "stream";
  for (const auto& t : tags) out += "\t" + t;
  out += "\n";
  char buf[64];
  for (std::size_t i = 0; i < tags.size(); ++i) {
    out += tags[i];
    for (std::size_t j = 0; j < tags.size(); ++j) {
      std::snprintf(buf, sizeof buf, "\t%.6f", values[i][j]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

CorrelationMatrix correlation_matrix(
    const std::vector<std::string>& tags,
    const std::vector<const CorrelationState*>& states) {
  CorrelationMatrix m;
  m.tags = tags;
  m.values.assign(tags.size(), std::vector<double>(tags.size(), 0.0));
  for (std::size_t i = 0; i < tags.size(); ++i) m.values[i][i] = 1.0;

  auto slot = [&](const std::string& tag) {
    for (std::size_t i = 0; i < tags.size(); ++i)
      if (tags[i] == tag) return i;
    throw std::invalid_argument("correlation_matrix: unknown stream " + tag);
  };

  std::size_t expected = tags.size() * (tags.size() - 1) / 2;
  std::size_t filled = 0;
  std::vector<std::vector<bool>> seen(tags.size(), std::vector<bool>(tags.size(), false));
  for (const auto* st : states) {
    std::size_t i = slot(st->s1);
    std::size_t j = slot(st->s2);
    if (i == j) throw std::invalid_argument("correlation_matrix: self pair");
    m.values[i][j] = m.values[j][i] = st->rho();
    if (!seen[i][j]) {
      seen[i][j] = seen[j][i] = true;
      ++filled;
    }
  }
  if (filled != expected)
    throw std::invalid_argument("correlation_matrix: missing stream pair");
  return m;
}

}  // namespace streamcorr
