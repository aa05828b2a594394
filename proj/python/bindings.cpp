#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "streamcorr/clusters.hpp"
#include "streamcorr/correlation.hpp"
#include "streamcorr/graphgen.hpp"
#include "streamcorr/ingest.hpp"
#include "streamcorr/phylo.hpp"
#include "streamcorr/search.hpp"
#include "streamcorr/store.hpp"
#include "streamcorr/windows.hpp"

namespace py = pybind11;
namespace sc = streamcorr;

namespace {

using EdgeTuple = std::tuple<double, std::string, std::string>;

std::vector<EdgeTuple> to_tuples(const std::vector<sc::TimedEdge>& edges) {
  std::vector<EdgeTuple> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.emplace_back(e.ts, e.src, e.dst);
  return out;
}

std::vector<sc::TimedEdge> from_tuples(const std::vector<EdgeTuple>& edges) {
  std::vector<sc::TimedEdge> out;
  out.reserve(edges.size());
  for (const auto& [ts, src, dst] : edges) out.push_back({ts, src, dst});
  return out;
}

sc::DynamicsMode mode_from(const std::string& mode) {
  if (mode == "uniform") return sc::DynamicsMode::uniform;
  if (mode == "concentrated") return sc::DynamicsMode::concentrated;
  if (mode == "step") return sc::DynamicsMode::step;
  throw std::invalid_argument("mode must be uniform, concentrated or step");
}

sc::ClusterParams params_from(double gamma, int alpha, int min_store) {
  sc::ClusterParams p;
  p.gamma = gamma;
  p.alpha = alpha;
  p.min_store = min_store;
  p.validate();
  return p;
}

py::dict result_to_dict(const sc::SearchResult& result) {
  py::dict out;
  out["status"] =
      result.status == sc::SearchStatus::ok ? "ok" : "unknown_tags";
  py::list hits;
  for (const auto& hit : result.hits) {
    py::dict h;
    h["tag"] = hit.tag;
    h["score"] = hit.score;
    h["degree"] = hit.degree;
    py::list witnesses;
    for (const auto& [name, stream, ts] : hit.explanation)
      witnesses.append(py::make_tuple(name, stream, ts));
    h["witnesses"] = witnesses;
    hits.append(h);
  }
  out["hits"] = hits;
  return out;
}

}  // namespace

PYBIND11_MODULE(_streamcorr, m) {
  m.doc() = "sliding-window stream correlation toolkit";

  py::class_<sc::Cluster>(m, "Cluster")
      .def_readonly("stream", &sc::Cluster::stream)
      .def_readonly("window_index", &sc::Cluster::window_index)
      .def_readonly("timestamp", &sc::Cluster::timestamp)
      .def_readonly("name", &sc::Cluster::name)
      .def_readonly("members", &sc::Cluster::members)
      .def("high_degree", &sc::Cluster::high_degree, py::arg("top") = 5)
      .def("contains", &sc::Cluster::contains, py::arg("tag"))
      .def("__repr__", [](const sc::Cluster& c) {
        return "<Cluster " + c.name + "@" + c.stream + " size " +
               std::to_string(c.members.size()) + ">";
      });

  py::class_<sc::Store>(m, "Store")
      .def(py::init([](const std::string& dir) {
             return std::make_unique<sc::Store>(dir);
           }),
           py::arg("dir"))
      .def("stream_tags", &sc::Store::stream_tags)
      .def("cluster_count", &sc::Store::cluster_count)
      .def("resolve",
           [](const sc::Store& s, const std::string& tag) {
             switch (s.resolve(tag)) {
               case sc::Store::TagKind::stream: return "stream";
               case sc::Store::TagKind::cluster: return "cluster";
               case sc::Store::TagKind::node: return "node";
               default: return "unknown";
             }
           },
           py::arg("tag"))
      .def("recent_clusters", &sc::Store::recent_clusters, py::arg("tag"),
           py::arg("t"), py::arg("limit") = 1)
      .def("latest_correlation", &sc::Store::latest_correlation, py::arg("a"),
           py::arg("b"), py::arg("t"))
      .def("correlation_history", &sc::Store::correlation_history,
           py::arg("a"), py::arg("b"))
      .def("put_cluster",
           [](sc::Store& s, const std::string& stream, long window_index,
              double timestamp,
              const std::vector<std::pair<std::string, int>>& members) {
             sc::Cluster c;
             c.stream = stream;
             c.window_index = window_index;
             c.timestamp = timestamp;
             c.members = members;
             c.name = members.empty() ? "" : members.front().first;
             s.put_cluster(c);
           },
           py::arg("stream"), py::arg("window_index"), py::arg("timestamp"),
           py::arg("members"))
      .def("append_correlation", &sc::Store::append_correlation, py::arg("a"),
           py::arg("b"), py::arg("rho"), py::arg("t"))
      .def("bytes_on_disk", &sc::Store::bytes_on_disk);

  m.def("generate_stream",
        [](const std::string& mode, std::size_t n, int q, long ticks,
           std::uint64_t seed, double tick_interval, double p_in,
           std::size_t s_size, long step_start, long step_length,
           const std::string& prefix,
           const std::vector<std::pair<int, double>>& probs) {
          sc::GeneratorSpec spec;
          spec.dist = probs.empty()
                          ? sc::DegreeDistribution::zipfian(n)
                          : sc::DegreeDistribution::explicit_table(n, probs);
          spec.dynamics.mode = mode_from(mode);
          spec.dynamics.q = q;
          spec.dynamics.p_in = p_in;
          spec.dynamics.tick_interval = tick_interval;
          spec.dynamics.step_start = step_start;
          spec.dynamics.step_length = step_length;
          spec.s_size = s_size;
          spec.ticks = ticks;
          spec.seed = seed;
          spec.prefix = prefix;
          return to_tuples(sc::generate_stream(spec));
        },
        py::arg("mode") = "uniform", py::arg("n") = 1000, py::arg("q") = 2,
        py::arg("ticks") = 100, py::arg("seed") = 1,
        py::arg("tick_interval") = 1.0, py::arg("p_in") = 0.8,
        py::arg("s_size") = 0, py::arg("step_start") = 0,
        py::arg("step_length") = 0, py::arg("prefix") = "g",
        py::arg("probs") = std::vector<std::pair<int, double>>{},
        "Synthetic edge stream as (ts, src, dst) tuples.");

  m.def("write_edge_file",
        [](const std::string& path, const std::vector<EdgeTuple>& edges) {
          sc::write_edge_file(path, from_tuples(edges));
        },
        py::arg("path"), py::arg("edges"));

  m.def("run_pipeline",
        [](const std::vector<std::pair<std::string, std::string>>& streams,
           const std::string& data_dir, double tau, double lambda,
           std::size_t k, double gamma, int alpha, int min_store,
           std::uint64_t seed, const std::string& report_dir, double end_time,
           const std::vector<std::string>& tweet_streams) {
          sc::PipelineConfig cfg;
          for (const auto& [name, path] : streams) {
            auto fmt = sc::StreamSource::Format::edges;
            for (const auto& t : tweet_streams)
              if (t == name) fmt = sc::StreamSource::Format::tweets;
            cfg.streams.push_back({name, path, fmt});
          }
          cfg.window.tau = tau;
          cfg.window.lambda = lambda;
          cfg.window.k = k;
          cfg.params = params_from(gamma, alpha, min_store);
          cfg.data_dir = data_dir;
          if (!report_dir.empty()) cfg.report_dir = report_dir;
          cfg.end_time = end_time;
          cfg.seed = seed;

          auto report = sc::run_pipeline(cfg);
          py::dict out;
          py::list counters;
          for (const auto& s : report.streams) {
            py::dict c;
            c["name"] = s.name;
            c["lines"] = s.lines;
            c["skipped_lines"] = s.skipped_lines;
            c["edges"] = s.edges;
            c["invalid_tag"] = s.invalid_tag;
            c["stale"] = s.stale;
            c["routed"] = s.routed;
            counters.append(c);
          }
          out["streams"] = counters;
          out["windows_closed"] = report.windows_closed;
          py::dict rho;
          for (const auto& [pair, series] : report.rho)
            rho[py::make_tuple(pair.first, pair.second)] = series;
          out["rho"] = rho;
          out["input_bytes"] = report.input_bytes;
          out["stored_bytes"] = report.stored_bytes;
          out["compression_ratio"] = report.compression_ratio();
          out["summary"] = report.to_text();
          return out;
        },
        py::arg("streams"), py::arg("data_dir"), py::arg("tau") = 60.0,
        py::arg("lambda_") = 30.0, py::arg("k") = 400, py::arg("gamma") = 0.8,
        py::arg("alpha") = 10, py::arg("min_store") = 10, py::arg("seed") = 1,
        py::arg("report_dir") = "", py::arg("end_time") = -1.0,
        py::arg("tweet_streams") = std::vector<std::string>{},
        "Replay edge files through windows, clusters, store and correlation.");

  m.def("search",
        [](const sc::Store& store, const std::vector<std::string>& tags,
           double t, std::size_t limit, int horizon,
           const std::string& newick) {
          sc::PhyloTree tree;
          bool have_tree = false;
          if (!newick.empty()) {
            tree = sc::parse_newick(newick);
            have_tree = true;
          }
          return result_to_dict(
              sc::search(store, have_tree ? &tree : nullptr, tags, t, limit,
                         horizon));
        },
        py::arg("store"), py::arg("tags"), py::arg("t"), py::arg("limit") = 5,
        py::arg("horizon") = 10, py::arg("newick") = "",
        "Correlated tags for a query, as {'status', 'hits'}.");

  m.def("coefficient", &sc::coefficient, py::arg("t_i"), py::arg("t_j"),
        py::arg("t"), py::arg("dist"));

  m.def("jaccard", &sc::jaccard, py::arg("a"), py::arg("b"));

  m.def("windows_for",
        [](double timestamp, double tau, double lambda) {
          sc::WindowConfig cfg;
          cfg.tau = tau;
          cfg.lambda = lambda;
          return sc::windows_for(timestamp, cfg);
        },
        py::arg("timestamp"), py::arg("tau") = 60.0, py::arg("lambda_") = 30.0,
        "Indices of the windows whose interval covers the timestamp.");

  m.def("connected_components",
        [](const std::vector<EdgeTuple>& edges) {
          std::vector<std::vector<std::pair<std::string, int>>> out;
          for (const auto& c : sc::connected_components(from_tuples(edges)))
            out.push_back(c.members);
          return out;
        },
        py::arg("edges"),
        "Components of an edge multiset, largest first, members with degrees.");

  m.def("detect_static",
        [](const std::vector<EdgeTuple>& edges, double gamma, int alpha,
           int min_store) {
          return sc::detect_static(from_tuples(edges),
                                   params_from(gamma, alpha, min_store)) ==
                 sc::Decision::Accept;
        },
        py::arg("edges"), py::arg("gamma") = 0.8, py::arg("alpha") = 10,
        py::arg("min_store") = 10,
        "True when the largest component of the sample reaches alpha.");

  m.def("neighbor_joining",
        [](const std::vector<std::string>& taxa,
           const std::vector<std::vector<double>>& d) {
          return sc::to_newick(sc::neighbor_joining(taxa, d));
        },
        py::arg("taxa"), py::arg("d"),
        "Newick text of the neighbor-joining tree of a distance matrix.");

  m.def("stream_tree",
        [](const sc::Store& store, double t) {
          auto tags = store.stream_tags();
          if (tags.size() < 2)
            throw std::invalid_argument("stream_tree: need at least two streams");
          sc::CorrelationMatrix mtx;
          mtx.tags = tags;
          mtx.values.assign(tags.size(),
                            std::vector<double>(tags.size(), 1.0));
          for (std::size_t i = 0; i < tags.size(); ++i)
            for (std::size_t j = i + 1; j < tags.size(); ++j) {
              double rho = store.latest_correlation(tags[i], tags[j], t);
              mtx.values[i][j] = rho;
              mtx.values[j][i] = rho;
            }
          auto d = sc::distance_from_correlation(mtx);
          return sc::to_newick(sc::neighbor_joining(tags, d));
        },
        py::arg("store"), py::arg("t"),
        "Newick phylogeny of the stored streams at time t.");

  m.def("tree_distance",
        [](const std::string& newick_a, const std::string& newick_b, int k) {
          return sc::tree_move_distance(sc::parse_newick(newick_a),
                                        sc::parse_newick(newick_b), k);
        },
        py::arg("newick_a"), py::arg("newick_b"), py::arg("k") = 2,
        "Move distance between two trees given as newick text.");

  m.def("leaf_distance",
        [](const std::string& newick, const std::string& a,
           const std::string& b) {
          return sc::leaf_distance(sc::parse_newick(newick), a, b);
        },
        py::arg("newick"), py::arg("a"), py::arg("b"),
        "Diameter-normalized leaf distance in a newick tree.");
}
