#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
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

}  // namespace

TEST_CASE("clusters round-trip through reopen") {
  TempDir dir("store-roundtrip");
  auto c1 = make_cluster("s1", 1, 60.0,
                         {{"hub", 5}, {"a", 3}, {"b", 2}, {"c", 1}});
  auto c2 = make_cluster("s1", 2, 90.0, {{"hub", 4}, {"d", 2}});
  auto c3 = make_cluster("s2", 1, 60.0, {{"other", 3}, {"e", 1}});
  {
    Store store(dir.path);
    store.put_cluster(c1);
    store.put_cluster(c2);
    store.put_cluster(c3);
    store.append_correlation("s1", "s2", 0.25, 60.0);
    store.append_correlation("s2", "s1", 0.5, 90.0);
    CHECK(store.cluster_count() == 3);
  }
  Store store(dir.path);
  CHECK(store.cluster_count() == 3);
  CHECK(store.stream_tags() == std::vector<std::string>{"s1", "s2"});

  auto got = store.recent_clusters("s1", 1000.0, 10);
  REQUIRE(got.size() == 2);
  CHECK(got[0].window_index == 2);  // most recent window first
  CHECK(got[0].name == "hub");
  CHECK(got[0].timestamp == 90.0);
  CHECK(got[1].members == c1.members);

  auto history = store.correlation_history("s1", "s2");
  REQUIRE(history.size() == 2);
  CHECK(history[0] == std::pair<double, double>{60.0, 0.25});
  CHECK(history[1] == std::pair<double, double>{90.0, 0.5});
  CHECK(store.latest_correlation("s1", "s2", 75.0) == 0.25);
  CHECK(store.latest_correlation("s1", "s2", 1000.0) == 0.5);
  CHECK(store.latest_correlation("s1", "s2", 10.0) == 0.0);
  CHECK(store.latest_correlation("s1", "zzz", 1000.0) == 0.0);
}

TEST_CASE("storing the same cluster twice is a no-op") {
  TempDir dir("store-dedup");
  Store store(dir.path);
  auto c = make_cluster("s1", 1, 60.0, {{"hub", 2}, {"a", 1}});
  store.put_cluster(c);
  store.put_cluster(c);
  CHECK(store.cluster_count() == 1);
  auto got = store.recent_clusters("s1", 100.0, 10);
  CHECK(got.size() == 1);
}

TEST_CASE("tag resolution prefers stream then cluster then node") {
  TempDir dir("store-resolve");
  Store store(dir.path);
  // "x" is simultaneously a stream tag, a cluster name and a member node.
  store.put_cluster(make_cluster("x", 1, 60.0, {{"n1", 2}, {"n2", 1}}));
  store.put_cluster(make_cluster("s2", 1, 60.0, {{"x", 3}, {"n3", 1}}));
  store.put_cluster(make_cluster("s3", 1, 60.0, {{"top", 4}, {"x", 2}}));

  CHECK(store.resolve("x") == Store::TagKind::stream);
  CHECK(store.resolve("top") == Store::TagKind::cluster);
  CHECK(store.resolve("n3") == Store::TagKind::node);
  CHECK(store.resolve("ghost") == Store::TagKind::unknown);

  // Stream resolution wins: only the cluster stored under stream "x" comes
  // back, not the ones naming or containing "x".
  auto got = store.recent_clusters("x", 100.0, 10);
  REQUIRE(got.size() == 1);
  CHECK(got[0].stream == "x");
}

TEST_CASE("node resolution returns every containing cluster") {
  TempDir dir("store-node");
  Store store(dir.path);
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"a", 2}, {"shared", 1}}));
  store.put_cluster(make_cluster("s2", 1, 60.0, {{"b", 2}, {"shared", 1}}));
  auto got = store.recent_clusters("shared", 100.0, 10);
  CHECK(got.size() == 2);
}

TEST_CASE("recent_clusters limit counts distinct close times") {
  TempDir dir("store-limit");
  Store store(dir.path);
  store.put_cluster(make_cluster("s1", 1, 60.0, {{"a", 1}}));
  store.put_cluster(make_cluster("s1", 2, 90.0, {{"b", 1}}));
  store.put_cluster(make_cluster("s1", 2, 90.0, {{"c", 1}}));
  store.put_cluster(make_cluster("s1", 3, 120.0, {{"d", 1}}));

  auto one = store.recent_clusters("s1", 1000.0, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].name == "d");

  auto two = store.recent_clusters("s1", 1000.0, 2);
  CHECK(two.size() == 3);  // window 3 plus both clusters of window 2

  // Time filter hides the future.
  auto past = store.recent_clusters("s1", 95.0, 1);
  REQUIRE(past.size() == 2);
  CHECK(past[0].timestamp == 90.0);
}

TEST_CASE("invalid input is rejected") {
  TempDir dir("store-invalid");
  Store store(dir.path);
  Cluster empty;
  empty.stream = "s";
  empty.name = "n";
  CHECK_THROWS_AS(store.put_cluster(empty), std::invalid_argument);

  auto bad_tag = make_cluster("s", 1, 1.0, {{"with\ttab", 1}});
  CHECK_THROWS_AS(store.put_cluster(bad_tag), std::invalid_argument);
  auto comma = make_cluster("s,x", 1, 1.0, {{"a", 1}});
  CHECK_THROWS_AS(store.put_cluster(comma), std::invalid_argument);

  auto wrong_name = make_cluster("s", 1, 1.0, {{"a", 1}, {"b", 1}});
  wrong_name.name = "zz";
  CHECK_THROWS_AS(store.put_cluster(wrong_name), std::invalid_argument);

  CHECK_THROWS_AS(store.append_correlation("a", "b", 1.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(store.append_correlation("a", "b", -0.1, 1.0),
                  std::invalid_argument);
}

TEST_CASE("table files stay referentially consistent") {
  TempDir dir("store-tables");
  {
    Store store(dir.path);
    store.put_cluster(make_cluster("s1", 1, 60.0, {{"hub", 3}, {"a", 1}}));
    store.put_cluster(make_cluster("s2", 5, 180.0, {{"w", 2}, {"v", 1}}));
    store.append_correlation("s1", "s2", 0.75, 180.0);
  }

  std::set<std::string> cluster_names;
  std::ifstream clusters(dir.path / "cluster.tbl");
  std::string line;
  std::size_t cluster_lines = 0;
  while (std::getline(clusters, line)) {
    ++cluster_lines;
    cluster_names.insert(line.substr(0, line.find('\t')));
  }
  CHECK(cluster_lines == 2);
  CHECK(cluster_names == std::set<std::string>{"hub", "w"});

  std::ifstream streams(dir.path / "stream.tbl");
  std::size_t stream_lines = 0;
  while (std::getline(streams, line)) {
    ++stream_lines;
    std::istringstream row(line);
    std::string stream, name, ts;
    std::getline(row, stream, '\t');
    std::getline(row, name, '\t');
    CHECK(cluster_names.count(name) == 1);
  }
  CHECK(stream_lines == 2);

  std::ifstream nodes(dir.path / "nodes.tbl");
  std::size_t node_lines = 0;
  while (std::getline(nodes, line)) {
    ++node_lines;
    std::istringstream row(line);
    std::string node, stream, name;
    std::getline(row, node, '\t');
    std::getline(row, stream, '\t');
    std::getline(row, name, '\t');
    CHECK(cluster_names.count(name) == 1);
  }
  CHECK(node_lines == 4);  // two members per cluster

  std::ifstream correlations(dir.path / "correlation.tbl");
  std::getline(correlations, line);
  CHECK(line.substr(0, 5) == "s1\ts2");

  Store reopened(dir.path);
  CHECK(reopened.bytes_on_disk() > 0);
  CHECK(reopened.cluster_count() == 2);
}

TEST_CASE("timestamps survive the text round-trip exactly") {
  TempDir dir("store-precision");
  double t = 12345.678901234567;
  {
    Store store(dir.path);
    store.put_cluster(make_cluster("s1", 3, t, {{"a", 1}}));
    store.append_correlation("s1", "s2", 1.0 / 3.0, t);
  }
  Store store(dir.path);
  auto got = store.recent_clusters("s1", 1e9, 1);
  REQUIRE(got.size() == 1);
  CHECK(got[0].timestamp == t);
  auto history = store.correlation_history("s1", "s2");
  REQUIRE(history.size() == 1);
  CHECK(history[0].first == t);
  CHECK(history[0].second == 1.0 / 3.0);
}
