#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "streamcorr/phylo.hpp"
#include "streamcorr/search.hpp"
#include "streamcorr/store.hpp"

using namespace streamcorr;
using testutil::TempDir;

namespace {

Cluster make_cluster(const std::string& stream, long window, double t,
                     std::vector<std::pair<std::string, int>> members) {
  Cluster c;
  c.stream = stream;
  c.window_index = window;
  c.timestamp = t;
  c.members = std::move(members);
  c.name = c.members.front().first;
  return c;
}

const SearchHit* find_hit(const SearchResult& r, const std::string& tag) {
  for (const auto& h : r.hits)
    if (h.tag == tag) return &h;
  return nullptr;
}

}  // namespace

TEST_CASE("coefficient matches the closed form") {
  CHECK(coefficient(20.0, 18.0, 24.0, 0.25) ==
        doctest::Approx(0.5729166666666667).epsilon(1e-15));
  CHECK(coefficient(24.0, 24.0, 24.0, 0.0) == doctest::Approx(1.0));
  CHECK(coefficient(10.0, 10.0, 20.0, 1.0) == 0.0);
  // The widest in-domain gap drives the recency factor to zero.
  CHECK(coefficient(24.0, 0.0, 24.0, 0.0) == 0.0);

  CHECK_THROWS_AS(coefficient(10.0, 12.0, 24.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coefficient(25.0, 10.0, 24.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coefficient(10.0, 5.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coefficient(10.0, 5.0, 24.0, 1.5), std::invalid_argument);
}

TEST_CASE("unknown tags are reported, not guessed") {
  TempDir dir("search-unknown");
  Store store(dir.path);
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"a", 2}, {"b", 1}}));
  auto r = search(store, nullptr, {"nope"}, 100.0);
  CHECK(r.status == SearchStatus::unknown_tags);
  CHECK(r.hits.empty());

  auto mixed = search(store, nullptr, {"nope", "a"}, 100.0);
  CHECK(mixed.status == SearchStatus::ok);
}

TEST_CASE("single tag answers with its cluster's high-degree members") {
  TempDir dir("search-single");
  Store store(dir.path);
  store.put_cluster(make_cluster(
      "s1", 1, 60.0,
      {{"hub", 9}, {"m1", 5}, {"m2", 4}, {"m3", 3}, {"m4", 2}, {"m5", 1}, {"m6", 1}}));

  auto r = search(store, nullptr, {"s1"}, 120.0, 5);
  REQUIRE(r.status == SearchStatus::ok);
  REQUIRE(r.hits.size() == 5);  // limit governs the high-degree cut
  CHECK(r.hits[0].tag == "hub");
  // Recency score: the window closed at 60 and the query is at 120.
  CHECK(r.hits[0].score == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.hits[0].degree == 9);
  REQUIRE(r.hits[0].explanation.size() == 1);
  CHECK(std::get<0>(r.hits[0].explanation[0]) == "hub");

  // The query tag itself never shows up as an answer.
  auto by_node = search(store, nullptr, {"hub"}, 120.0, 5);
  CHECK(find_hit(by_node, "hub") == nullptr);
  CHECK(by_node.hits.size() == 5);
}

TEST_CASE("intersection members outrank plain cluster members") {
  TempDir dir("search-intersection");
  Store store(dir.path);
  // One stream, one window, two clusters sharing exactly one node.
  store.put_cluster(make_cluster(
      "s1", 1, 60.0, {{"c1top", 5}, {"x", 3}, {"a1", 2}, {"n7", 2}, {"a2", 1}}));
  store.put_cluster(make_cluster(
      "s1", 1, 60.0, {{"c2top", 6}, {"x", 4}, {"n8", 2}, {"b1", 1}, {"b2", 1}}));

  auto r = search(store, nullptr, {"s1", "n7", "n8"}, 120.0, 5);
  REQUIRE(r.status == SearchStatus::ok);
  REQUIRE(!r.hits.empty());
  // x is the only node the query clusters agree on.
  CHECK(r.hits[0].tag == "x");
  const auto* x = find_hit(r, "x");
  REQUIRE(x != nullptr);
  // Witnessed by both clusters.
  bool from_c1 = false, from_c2 = false;
  for (const auto& w : x->explanation) {
    if (std::get<0>(w) == "c1top") from_c1 = true;
    if (std::get<0>(w) == "c2top") from_c2 = true;
  }
  CHECK(from_c1);
  CHECK(from_c2);
  CHECK(x->degree == 4);

  // Input tags stay out of the answers.
  CHECK(find_hit(r, "n7") == nullptr);
  CHECK(find_hit(r, "n8") == nullptr);
  CHECK(find_hit(r, "s1") == nullptr);
}

TEST_CASE("limit truncates the ranked answers") {
  TempDir dir("search-limit");
  Store store(dir.path);
  std::vector<std::pair<std::string, int>> members{{"hub", 20}};
  for (int i = 0; i < 12; ++i)
    members.push_back({"m" + std::to_string(i), 10 - i % 5});
  store.put_cluster(make_cluster("s1", 1, 60.0, members));
  auto r3 = search(store, nullptr, {"s1"}, 100.0, 3);
  CHECK(r3.hits.size() == 3);
  auto r7 = search(store, nullptr, {"s1"}, 100.0, 7);
  CHECK(r7.hits.size() == 7);
}

TEST_CASE("containment pulls in the rest of a matching cluster") {
  TempDir dir("search-containment");
  Store store(dir.path);
  store.put_cluster(make_cluster(
      "s1", 1, 60.0, {{"big", 7}, {"q1", 3}, {"q2", 2}, {"deep", 1}}));
  store.put_cluster(make_cluster("s2", 1, 60.0, {{"big", 4}, {"other", 1}}));

  // q1 lives only in the s1 cluster; big bridges both clusters.
  auto r = search(store, nullptr, {"q1", "other"}, 120.0, 5);
  REQUIRE(r.status == SearchStatus::ok);
  const auto* big = find_hit(r, "big");
  REQUIRE(big != nullptr);
  CHECK(big->degree == 7);
  CHECK(r.hits[0].tag == "big");
}

TEST_CASE("stale tags fall back to older windows") {
  TempDir dir("search-fallback");
  Store store(dir.path);
  // Window 1 holds the co-occurrence; window 2 holds fresh but disjoint
  // clusters, so the pair only intersects after stepping one window back.
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"a", 3}, {"x", 2}, {"z", 1}}));
  store.put_cluster(make_cluster("s2", 1, 60.0, {{"b", 3}, {"x", 2}, {"w", 1}}));
  store.put_cluster(make_cluster("s1", 2, 90.0, {{"p", 2}, {"p2", 1}}));
  store.put_cluster(make_cluster("s2", 2, 90.0, {{"r", 2}, {"r2", 1}}));

  auto r = search(store, nullptr, {"a", "b"}, 120.0, 5);
  REQUIRE(r.status == SearchStatus::ok);
  const auto* x = find_hit(r, "x");
  REQUIRE(x != nullptr);
  CHECK(r.hits[0].tag == "x");
}

TEST_CASE("phylogeny widens the candidate streams before older windows") {
  TempDir dir("search-tree");
  Store store(dir.path);
  // s1 and s2 never share a node; s3 is phylogeny-close to s1 and shares
  // "link" with s2's cluster.
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"a", 3}, {"a1", 1}}));
  store.put_cluster(make_cluster("s2", 1, 60.0, {{"b", 3}, {"link", 2}}));
  store.put_cluster(make_cluster("s3", 1, 60.0, {{"c", 3}, {"link", 2}, {"c1", 1}}));

  // s1-s2 carries the diameter; s3 sits within distance < 1 of s2 so the
  // widened pair (s3, s2) keeps a positive coefficient.
  auto tree = parse_newick("((s1:5,s3:1):1,s2:1);");
  auto r = search(store, &tree, {"a", "b"}, 120.0, 5);
  REQUIRE(r.status == SearchStatus::ok);
  CHECK(find_hit(r, "link") != nullptr);
}

TEST_CASE("hits order by score, then degree, then tag") {
  TempDir dir("search-order");
  Store store(dir.path);
  store.put_cluster(make_cluster(
      "s1", 1, 60.0, {{"hub", 9}, {"tie_a", 4}, {"tie_b", 4}, {"low", 1}}));
  auto r = search(store, nullptr, {"s1"}, 120.0, 4);
  REQUIRE(r.hits.size() == 4);
  CHECK(r.hits[0].tag == "hub");
  CHECK(r.hits[1].tag == "tie_a");
  CHECK(r.hits[2].tag == "tie_b");
  CHECK(r.hits[3].tag == "low");
}

TEST_CASE("answers are time-dependent") {
  TempDir dir("search-time");
  Store store(dir.path);
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"early", 3}, {"e1", 1}}));
  store.put_cluster(make_cluster("s1", 4, 150.0, {{"late", 3}, {"l1", 1}}));

  auto ranked = time_ranked_answers(store, nullptr, "s1", {100.0, 200.0}, 5);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].first == 100.0);
  // At t=100 only window 1 exists.
  CHECK(find_hit(ranked[0].second, "early") != nullptr);
  CHECK(find_hit(ranked[0].second, "late") == nullptr);
  // At t=200 the latest window wins the resolution.
  CHECK(find_hit(ranked[1].second, "late") != nullptr);
}
