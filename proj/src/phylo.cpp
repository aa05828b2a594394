#include "streamcorr/phylo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace streamcorr {

namespace {

std::string fmt_len(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<int> PhyloTree::leaves() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (!nodes[v].label.empty()) out.push_back(static_cast<int>(v));
  return out;
}

int PhyloTree::leaf_index(const std::string& label) const {
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (nodes[v].label == label) return static_cast<int>(v);
  return -1;
}

double PhyloTree::path_length(int a, int b) const {
  if (a == b) return 0.0;
  std::vector<double> dist(nodes.size(), -1.0);
  std::vector<int> queue{a};
  dist[static_cast<std::size_t>(a)] = 0.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    for (auto [w, len] : nodes[static_cast<std::size_t>(v)].nbrs) {
      if (dist[static_cast<std::size_t>(w)] >= 0.0) continue;
      dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + len;
      if (w == b) return dist[static_cast<std::size_t>(w)];
      queue.push_back(w);
    }
  }
  throw std::invalid_argument("phylo: nodes are not connected");
}

double PhyloTree::diameter() const {
  double best = 0.0;
  auto ls = leaves();
  for (std::size_t i = 0; i < ls.size(); ++i)
    for (std::size_t j = i + 1; j < ls.size(); ++j)
      best = std::max(best, path_length(ls[i], ls[j]));
  return best;
}

void PhyloTree::validate() const {
  std::size_t half_edges = 0;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    for (auto [w, len] : nodes[v].nbrs) {
      if (w < 0 || static_cast<std::size_t>(w) >= nodes.size() ||
          static_cast<std::size_t>(w) == v)
        throw std::invalid_argument("phylo: bad adjacency");
      if (len < 0.0) throw std::invalid_argument("phylo: negative edge length");
      ++half_edges;
    }
  }
  if (nodes.empty()) throw std::invalid_argument("phylo: empty tree");
  if (half_edges != 2 * (nodes.size() - 1))
    throw std::invalid_argument("phylo: not a tree (edge count)");
  // Connectivity: walk from node 0.
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> queue{0};
  seen[0] = true;
  std::size_t visited = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (auto [w, len] : nodes[static_cast<std::size_t>(queue[head])].nbrs) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      ++visited;
      queue.push_back(w);
    }
  }
  if (visited != nodes.size())
    throw std::invalid_argument("phylo: not a tree (disconnected)");
  std::unordered_set<std::string> labels;
  for (const auto& node : nodes)
    if (!node.label.empty() && !labels.insert(node.label).second)
      throw std::invalid_argument("phylo: duplicate label " + node.label);
}

std::vector<std::vector<double>> distance_from_correlation(const CorrelationMatrix& A) {
  const std::size_t n = A.tags.size();
  if (A.values.size() != n)
    throw std::invalid_argument("distance_from_correlation: ragged matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (A.values[i].size() != n)
      throw std::invalid_argument("distance_from_correlation: ragged matrix");
    if (A.values[i][i] != 1.0)
      throw std::invalid_argument("distance_from_correlation: diagonal must be 1");
    for (std::size_t j = 0; j < n; ++j) {
      if (A.values[i][j] < 0.0 || A.values[i][j] > 1.0)
        throw std::invalid_argument("distance_from_correlation: entry outside [0,1]");
      if (A.values[i][j] != A.values[j][i])
        throw std::invalid_argument("distance_from_correlation: asymmetric matrix");
    }
  }
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[i][j] = i == j ? 0.0 : 1.0 - A.values[i][j];
  return d;
}

PhyloTree neighbor_joining(const std::vector<std::string>& taxa,
                           const std::vector<std::vector<double>>& d0) {
  const std::size_t n = taxa.size();
  if (d0.size() != n)
    throw std::invalid_argument("neighbor_joining: matrix does not match taxa");
  for (std::size_t i = 0; i < n; ++i) {
    if (d0[i].size() != n)
      throw std::invalid_argument("neighbor_joining: ragged matrix");
    if (d0[i][i] != 0.0)
      throw std::invalid_argument("neighbor_joining: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j)
      if (d0[i][j] != d0[j][i])
        throw std::invalid_argument("neighbor_joining: asymmetric matrix");
  }
  if (n == 0) throw std::invalid_argument("neighbor_joining: no taxa");

  PhyloTree t;
  for (const auto& name : taxa) {
    if (name.empty())
      throw std::invalid_argument("neighbor_joining: empty taxon label");
    t.nodes.push_back({name, {}});
  }
  if (n == 1) return t;

  auto link = [&t](int a, int b, double len) {
    len = std::max(0.0, len);
    t.nodes[static_cast<std::size_t>(a)].nbrs.emplace_back(b, len);
    t.nodes[static_cast<std::size_t>(b)].nbrs.emplace_back(a, len);
  };

  if (n == 2) {
    link(0, 1, d0[0][1]);
    return t;
  }

  // active[i] = tree node carrying row i of the shrinking matrix.
  std::vector<int> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = static_cast<int>(i);
  std::vector<std::vector<double>> d = d0;

  while (active.size() > 2) {
    const std::size_t m = active.size();
    std::vector<double> r(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) r[i] += d[i][j];

    // Pick the pair minimizing Q; first minimum in row-major order so the
    // result is deterministic under ties.
    double best_q = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        double q = (static_cast<double>(m) - 2.0) * d[i][j] - r[i] - r[j];
        if (q < best_q - 1e-15) {
          best_q = q;
          bi = i;
          bj = j;
        }
      }
    }

    double li = 0.5 * d[bi][bj] + (r[bi] - r[bj]) / (2.0 * (static_cast<double>(m) - 2.0));
    double lj = d[bi][bj] - li;
    if (li < 0.0) {
      lj = d[bi][bj];
      li = 0.0;
    } else if (lj < 0.0) {
      li = d[bi][bj];
      lj = 0.0;
    }

    int parent = static_cast<int>(t.nodes.size());
    t.nodes.push_back({"", {}});
    link(parent, active[bi], li);
    link(parent, active[bj], lj);

    // Fold rows bi and bj into one row for the new node.
    std::vector<double> fresh;
    fresh.reserve(m - 1);
    std::vector<int> next_active;
    std::vector<std::vector<double>> next_d;
    for (std::size_t a = 0; a < m; ++a) {
      if (a == bi || a == bj) continue;
      fresh.push_back(0.5 * (d[bi][a] + d[bj][a] - d[bi][bj]));
      next_active.push_back(active[a]);
    }
    next_active.push_back(parent);

    const std::size_t mm = next_active.size();
    next_d.assign(mm, std::vector<double>(mm, 0.0));
    std::size_t ia = 0;
    for (std::size_t a = 0; a < m; ++a) {
      if (a == bi || a == bj) continue;
      std::size_t ib = 0;
      for (std::size_t b = 0; b < m; ++b) {
        if (b == bi || b == bj) continue;
        next_d[ia][ib] = d[a][b];
        ++ib;
      }
      ++ia;
    }
    for (std::size_t a = 0; a + 1 < mm; ++a) {
      next_d[a][mm - 1] = next_d[mm - 1][a] = fresh[a];
    }
    active = std::move(next_active);
    d = std::move(next_d);
  }

  link(active[0], active[1], d[0][1]);
  return t;
}

namespace {

// Centroid rooting shared by kgram_profile. Returns (root, virtual_added).
std::pair<int, bool> centroid_root(PhyloTree& t) {
  const std::size_t n = t.nodes.size();
  if (n == 1) return {0, false};

  // subtree_size[v] relative to an arbitrary root 0, computed iteratively.
  std::vector<int> parent(n, -1), order;
  order.reserve(n);
  order.push_back(0);
  parent[0] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    for (auto [w, len] : t.nodes[static_cast<std::size_t>(v)].nbrs)
      if (parent[static_cast<std::size_t>(w)] == -1) {
        parent[static_cast<std::size_t>(w)] = v;
        order.push_back(w);
      }
  }
  std::vector<int> size(n, 1);
  for (std::size_t i = order.size(); i-- > 1;)
    size[static_cast<std::size_t>(parent[static_cast<std::size_t>(order[i])])] +=
        size[static_cast<std::size_t>(order[i])];

  // The centroid minimizes the largest component left by its removal.
  auto weight = [&](int v) {
    int heaviest = static_cast<int>(n) - size[static_cast<std::size_t>(v)];
    for (auto [w, len] : t.nodes[static_cast<std::size_t>(v)].nbrs)
      if (parent[static_cast<std::size_t>(w)] == v)
        heaviest = std::max(heaviest, size[static_cast<std::size_t>(w)]);
    return heaviest;
  };

  int best = 0, best_w = weight(0);
  for (std::size_t v = 1; v < n; ++v) {
    int w = weight(static_cast<int>(v));
    if (w < best_w) {
      best = static_cast<int>(v);
      best_w = w;
    }
  }

  // A second node of equal weight means the centroid is an edge; root on a
  // virtual node splitting it so both orientations canonicalize identically.
  for (auto [w, len] : t.nodes[static_cast<std::size_t>(best)].nbrs) {
    if (weight(w) != best_w) continue;
    int virt = static_cast<int>(t.nodes.size());
    t.nodes.push_back({"", {}});
    auto detach = [&t](int a, int b) {
      auto& nb = t.nodes[static_cast<std::size_t>(a)].nbrs;
      for (std::size_t i = 0; i < nb.size(); ++i)
        if (nb[i].first == b) {
          double len = nb[i].second;
          nb.erase(nb.begin() + static_cast<std::ptrdiff_t>(i));
          return len;
        }
      return 0.0;
    };
    double cut = detach(best, w);
    detach(w, best);
    t.nodes[static_cast<std::size_t>(virt)].nbrs.emplace_back(best, cut / 2.0);
    t.nodes[static_cast<std::size_t>(best)].nbrs.emplace_back(virt, cut / 2.0);
    t.nodes[static_cast<std::size_t>(virt)].nbrs.emplace_back(w, cut / 2.0);
    t.nodes[static_cast<std::size_t>(w)].nbrs.emplace_back(virt, cut / 2.0);
    return {virt, true};
  }
  return {best, false};
}

}  // namespace

std::map<std::string, long> kgram_profile(const PhyloTree& tree, int k) {
  if (k < 1) throw std::invalid_argument("kgram_profile: k must be >= 1");
  tree.validate();

  PhyloTree rooted = tree;  // centroid rooting may add a virtual node
  auto [root, virt] = centroid_root(rooted);

  const std::size_t n = rooted.nodes.size();
  std::vector<int> parent(n, -1), order;
  order.reserve(n);
  order.push_back(root);
  parent[static_cast<std::size_t>(root)] = root;
  for (std::size_t head = 0; head < order.size(); ++head) {
    int v = order[head];
    for (auto [w, len] : rooted.nodes[static_cast<std::size_t>(v)].nbrs)
      if (parent[static_cast<std::size_t>(w)] == -1) {
        parent[static_cast<std::size_t>(w)] = v;
        order.push_back(w);
      }
  }

  // sig[v][d]: canonical signature of v's subtree truncated at depth d.
  // Children signatures are sorted, so label-isomorphic subtrees coincide.
  std::map<std::string, long> profile;
  std::vector<std::vector<std::string>> sig(n);
  for (auto& s : sig) s.resize(static_cast<std::size_t>(k) + 1);

  for (std::size_t i = order.size(); i-- > 0;) {
    int v = order[i];
    const std::string key =
        rooted.nodes[static_cast<std::size_t>(v)].label.empty()
            ? "*"
            : rooted.nodes[static_cast<std::size_t>(v)].label;
    std::vector<int> children;
    for (auto [w, len] : rooted.nodes[static_cast<std::size_t>(v)].nbrs)
      if (parent[static_cast<std::size_t>(w)] == v) children.push_back(w);

    sig[static_cast<std::size_t>(v)][0] = "(" + key + ")";
    for (int depth = 1; depth <= k; ++depth) {
      std::vector<std::string> parts;
      parts.reserve(children.size());
      for (int c : children)
        parts.push_back(sig[static_cast<std::size_t>(c)][static_cast<std::size_t>(depth - 1)]);
      std::sort(parts.begin(), parts.end());
      std::string s = "(" + key;
      for (const auto& p : parts) s += p;
      s += ")";
      sig[static_cast<std::size_t>(v)][static_cast<std::size_t>(depth)] = std::move(s);
    }
    profile[sig[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)]] += 1;
  }
  return profile;
}

long tree_move_distance(const PhyloTree& a, const PhyloTree& b, int k) {
  auto pa = kgram_profile(a, k);
  auto pb = kgram_profile(b, k);
  long l1 = 0;
  for (const auto& [s, cnt] : pa) {
    auto it = pb.find(s);
    l1 += std::abs(cnt - (it == pb.end() ? 0 : it->second));
  }
  for (const auto& [s, cnt] : pb)
    if (!pa.count(s)) l1 += cnt;
  return (l1 + 1) / 2;
}

double leaf_distance(const PhyloTree& tree, const std::string& a,
                     const std::string& b) {
  int ia = tree.leaf_index(a);
  int ib = tree.leaf_index(b);
  if (ia < 0 || ib < 0)
    throw std::invalid_argument("leaf_distance: unknown leaf");
  if (ia == ib) return 0.0;
  double diam = tree.diameter();
  if (diam <= 0.0) return 0.0;
  return tree.path_length(ia, ib) / diam;
}

std::string to_newick(const PhyloTree& tree) {
  tree.validate();
  if (tree.nodes.size() == 1) return tree.nodes[0].label + ";";

  int root = -1;
  for (std::size_t v = 0; v < tree.nodes.size(); ++v)
    if (tree.nodes[v].nbrs.size() >= 3) {
      root = static_cast<int>(v);
      break;
    }
  if (root == -1) root = 0;  // path-shaped tree: root at an end

  std::function<std::string(int, int)> write = [&](int v, int from) {
    std::vector<std::pair<int, double>> children;
    for (auto [w, len] : tree.nodes[static_cast<std::size_t>(v)].nbrs)
      if (w != from) children.emplace_back(w, len);
    std::string out;
    if (!children.empty()) {
      out += "(";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) out += ",";
        out += write(children[i].first, v) + ":" + fmt_len(children[i].second);
      }
      out += ")";
    }
    out += tree.nodes[static_cast<std::size_t>(v)].label;
    return out;
  };
  return write(root, -1) + ";";
}

PhyloTree parse_newick(const std::string& text) {
  PhyloTree t;
  std::size_t pos = 0;

  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const char* why) {
    throw std::invalid_argument(std::string("parse_newick: ") + why + " at offset " +
                                std::to_string(pos));
  };

  // Recursive descent; returns (node index, branch length to parent).
  std::function<std::pair<int, double>()> node = [&]() -> std::pair<int, double> {
    skip_ws();
    int v = static_cast<int>(t.nodes.size());
    t.nodes.push_back({"", {}});
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      while (true) {
        auto [child, len] = node();
        t.nodes[static_cast<std::size_t>(v)].nbrs.emplace_back(child, len);
        t.nodes[static_cast<std::size_t>(child)].nbrs.emplace_back(v, len);
        skip_ws();
        if (pos >= text.size()) fail("unterminated group");
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        fail("expected ',' or ')'");
      }
    }
    skip_ws();
    std::string label;
    while (pos < text.size() && text.find_first_of("(),:;", pos) != pos &&
           !std::isspace(static_cast<unsigned char>(text[pos]))) {
      label += text[pos++];
    }
    t.nodes[static_cast<std::size_t>(v)].label = label;
    skip_ws();
    double len = 1.0;
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      std::size_t used = 0;
      try {
        len = std::stod(text.substr(pos), &used);
      } catch (const std::exception&) {
        fail("bad branch length");
      }
      if (len < 0.0) fail("negative branch length");
      pos += used;
    }
    return {v, len};
  };

  auto [root, root_len] = node();
  skip_ws();
  if (pos >= text.size() || text[pos] != ';') fail("missing ';'");

  // Splice rooted-form artifacts: unlabeled nodes of degree 2.
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    if (!t.nodes[v].label.empty() || t.nodes[v].nbrs.size() != 2) continue;
    auto [a, la] = t.nodes[v].nbrs[0];
    auto [b, lb] = t.nodes[v].nbrs[1];
    auto relink = [&](int x, double extra) {
      for (auto& [w, len] : t.nodes[static_cast<std::size_t>(x)].nbrs)
        if (w == static_cast<int>(v)) {
          w = x == a ? b : a;
          len += extra;
        }
    };
    relink(a, lb);
    relink(b, la);
    t.nodes[v].nbrs.clear();
  }

  // Compact away the spliced-out nodes.
  std::vector<int> remap(t.nodes.size(), -1);
  PhyloTree out;
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    if (t.nodes[v].label.empty() && t.nodes[v].nbrs.empty() && t.nodes.size() > 1)
      continue;
    remap[v] = static_cast<int>(out.nodes.size());
    out.nodes.push_back({t.nodes[v].label, {}});
  }
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    if (remap[v] < 0) continue;
    for (auto [w, len] : t.nodes[v].nbrs)
      out.nodes[static_cast<std::size_t>(remap[v])].nbrs.emplace_back(
          remap[static_cast<std::size_t>(w)], len);
  }
  out.validate();
  return out;
}

}  // namespace streamcorr
