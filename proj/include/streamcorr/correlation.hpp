#pragma once

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace streamcorr {

// Jaccard similarity |A n B| / |A u B|; 0 when both sets are empty.
double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b);

// Cumulative cluster-node sets of one stream pair and the running rho = I/U.
// I and U are carried as exact integers; after every update rho equals the
// batch Jaccard of c1 and c2.
struct CorrelationState {
  std::string s1, s2;
  std::unordered_set<std::string> c1, c2;
  long long I = 0;
  long long U = 0;
  std::vector<std::pair<double, double>> history;  // (t_i, rho(t_i))

  CorrelationState() = default;
  CorrelationState(std::string a, std::string b)
      : s1(std::move(a)), s2(std::move(b)) {}

  double rho() const { return U > 0 ? static_cast<double>(I) / static_cast<double>(U) : 0.0; }
};

// One window-close update: fold the nodes of the clusters closed at time t
// into the cumulative sets and advance rho incrementally. I grows by the
// intersection delta and U by the net union growth, which keeps the
// incremental value identical to the batch Jaccard.
void rho_step(CorrelationState& state, const std::vector<std::string>& new1,
              const std::vector<std::string>& new2, double t);

// Centered moving average rho'(t) = (rho(t-1) + rho(t) + rho(t+1)) / 3 over
// the interior points; fewer than 3 points yield an empty series.
std::vector<std::pair<double, double>> rho_averaged(
    const std::vector<std::pair<double, double>>& history);

struct CorrelationMatrix {
  std::vector<std::string> tags;
  std::vector<std::vector<double>> values;  // unit diagonal, symmetric

  std::string to_text() const;  // header row of tags, then one row per stream
};

// Assembles the symmetric matrix A[i][j] = rho of pair (tags[i], tags[j])
// from per-pair states. Every off-diagonal pair must be present.
CorrelationMatrix correlation_matrix(const std::vector<std::string>& tags,
                                     const std::vector<const CorrelationState*>& states);

}  // namespace streamcorr
