#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamcorr/clusters.hpp"
#include "streamcorr/correlation.hpp"
#include "streamcorr/graphgen.hpp"
#include "streamcorr/ingest.hpp"
#include "streamcorr/phylo.hpp"
#include "streamcorr/search.hpp"
#include "streamcorr/store.hpp"
#include "streamcorr/windows.hpp"

namespace sc = streamcorr;

namespace {

sc::CorrelationMatrix matrix_from_store(const sc::Store& store,
                                        const std::vector<std::string>& tags,
                                        double t) {
  sc::CorrelationMatrix m;
  m.tags = tags;
  m.values.assign(tags.size(), std::vector<double>(tags.size(), 1.0));
  for (std::size_t i = 0; i < tags.size(); ++i)
    for (std::size_t j = i + 1; j < tags.size(); ++j) {
      double rho = store.latest_correlation(tags[i], tags[j], t);
      m.values[i][j] = rho;
      m.values[j][i] = rho;
    }
  return m;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

constexpr double kNoTime = -1.0;

double effective_time(double at) {
  return at >= 0 ? at : std::numeric_limits<double>::max();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliding-window stream correlation toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "emit a synthetic edge stream");
  std::string gen_config, gen_out = "stream.edges", gen_mode, gen_prefix;
  long long gen_n = -1, gen_q = -1, gen_ticks = -1, gen_s_size = -1;
  long long gen_step_start = -1, gen_step_length = -1;
  double gen_p_in = -1, gen_tick_interval = -1;
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  gen->add_option("--config", gen_config, "key=value generator configuration");
  gen->add_option("--out", gen_out, "output edge file");
  gen->add_option("--mode", gen_mode, "uniform | concentrated | step");
  gen->add_option("--n", gen_n, "node count");
  gen->add_option("--q", gen_q, "edges rematched per tick");
  gen->add_option("--p-in", gen_p_in, "concentration probability");
  gen->add_option("--tick-interval", gen_tick_interval, "time per tick");
  gen->add_option("--step-start", gen_step_start, "first concentrated tick");
  gen->add_option("--step-length", gen_step_length, "concentrated tick count");
  gen->add_option("--ticks", gen_ticks, "tick count");
  gen->add_option("--s-size", gen_s_size, "planted high-degree set size");
  gen->add_option("--prefix", gen_prefix, "node tag prefix");
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "rng seed");

  // run
  auto* run = app.add_subcommand("run", "replay streams through the pipeline");
  std::string run_config, run_data_dir, run_report_dir;
  std::vector<std::string> run_streams, run_tweets;
  double run_tau = -1, run_lambda = -1, run_gamma = -1, run_end = kNoTime;
  long long run_k = -1, run_alpha = -1, run_min_store = -1;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  run->add_option("--config", run_config, "key=value pipeline configuration");
  run->add_option("--stream", run_streams, "name=path input (repeatable)");
  run->add_option("--tweets", run_tweets, "stream names in tweet format");
  run->add_option("--tau", run_tau, "window length");
  run->add_option("--lambda", run_lambda, "window spacing");
  run->add_option("--k", run_k, "reservoir capacity");
  run->add_option("--gamma", run_gamma, "cluster density parameter");
  run->add_option("--alpha", run_alpha, "acceptance threshold");
  run->add_option("--min-store", run_min_store, "smallest stored component");
  auto* run_seed_opt = run->add_option("--seed", run_seed, "rng seed");
  run->add_option("--data-dir", run_data_dir, "store directory");
  run->add_option("--report-dir", run_report_dir, "series output directory");
  run->add_option("--end-time", run_end, "close windows up to this time");

  // correlate
  auto* cor = app.add_subcommand("correlate", "print the correlation matrix");
  std::string cor_data_dir;
  double cor_at = kNoTime;
  std::vector<std::string> cor_tags;
  cor->add_option("--data-dir", cor_data_dir, "store directory")->required();
  cor->add_option("--at", cor_at, "report time (default: latest)");
  cor->add_option("tags", cor_tags, "stream tags (default: all)");

  // tree
  auto* tree = app.add_subcommand("tree", "stream phylogeny from correlations");
  std::string tree_data_dir, tree_out;
  double tree_at = kNoTime;
  tree->add_option("--data-dir", tree_data_dir, "store directory")->required();
  tree->add_option("--at", tree_at, "report time (default: latest)");
  tree->add_option("--out", tree_out, "write the newick text here too");

  // treedist
  auto* td = app.add_subcommand("treedist", "move distance between two trees");
  std::string td_a, td_b;
  long long td_k = 2;
  td->add_option("first", td_a, "newick file")->required();
  td->add_option("second", td_b, "newick file")->required();
  td->add_option("--k", td_k, "subtree signature depth");

  // search
  auto* sr = app.add_subcommand("search", "correlated tags for a query");
  std::string sr_data_dir, sr_tree;
  double sr_at = kNoTime;
  long long sr_limit = 5, sr_horizon = 10;
  std::vector<std::string> sr_tags;
  sr->add_option("--data-dir", sr_data_dir, "store directory")->required();
  sr->add_option("--at", sr_at, "query time")->required();
  sr->add_option("--limit", sr_limit, "answer count");
  sr->add_option("--horizon", sr_horizon, "fallback window depth");
  sr->add_option("--tree", sr_tree, "newick phylogeny for stream distances");
  sr->add_option("tags", sr_tags, "query tags")->required();

  CLI11_PARSE(app, argc, argv);
  gen_seed_set = gen_seed_opt->count() > 0;
  run_seed_set = run_seed_opt->count() > 0;

  try {
    if (*gen) {
      std::vector<std::pair<std::string, std::string>> kv;
      if (!gen_config.empty()) kv = sc::parse_kv_file(gen_config);
      if (!gen_mode.empty()) kv.emplace_back("mode", gen_mode);
      if (gen_n >= 0) kv.emplace_back("n", std::to_string(gen_n));
      if (gen_q >= 0) kv.emplace_back("q", std::to_string(gen_q));
      if (gen_p_in >= 0) kv.emplace_back("p_in", std::to_string(gen_p_in));
      if (gen_tick_interval >= 0)
        kv.emplace_back("tick_interval", std::to_string(gen_tick_interval));
      if (gen_step_start >= 0)
        kv.emplace_back("step_start", std::to_string(gen_step_start));
      if (gen_step_length >= 0)
        kv.emplace_back("step_length", std::to_string(gen_step_length));
      if (gen_ticks >= 0) kv.emplace_back("ticks", std::to_string(gen_ticks));
      if (gen_s_size >= 0) kv.emplace_back("s_size", std::to_string(gen_s_size));
      if (!gen_prefix.empty()) kv.emplace_back("prefix", gen_prefix);
      if (gen_seed_set) kv.emplace_back("seed", std::to_string(gen_seed));

      auto spec = sc::generator_spec_from_kv(kv);
      auto edges = sc::generate_stream(spec);
      sc::write_edge_file(gen_out, edges);
      std::cout << edges.size() << " edges -> " << gen_out << "\n";
    } else if (*run) {
      sc::PipelineConfig cfg;
      if (!run_config.empty())
        cfg = sc::pipeline_config_from_kv(sc::parse_kv_file(run_config));
      for (const auto& s : run_streams) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
          throw std::runtime_error("--stream expects name=path: " + s);
        cfg.streams.push_back(
            {s.substr(0, eq), s.substr(eq + 1), sc::StreamSource::Format::edges});
      }
      for (const auto& name : run_tweets) {
        bool found = false;
        for (auto& s : cfg.streams)
          if (s.name == name) {
            s.format = sc::StreamSource::Format::tweets;
            found = true;
          }
        if (!found)
          throw std::runtime_error("--tweets names an undeclared stream: " + name);
      }
      if (run_tau > 0) cfg.window.tau = run_tau;
      if (run_lambda > 0) cfg.window.lambda = run_lambda;
      if (run_k > 0) cfg.window.k = static_cast<std::size_t>(run_k);
      if (run_gamma > 0) cfg.params.gamma = run_gamma;
      if (run_alpha > 0) cfg.params.alpha = static_cast<int>(run_alpha);
      if (run_min_store > 0) cfg.params.min_store = static_cast<int>(run_min_store);
      if (run_seed_set) cfg.seed = run_seed;
      if (!run_data_dir.empty()) cfg.data_dir = run_data_dir;
      if (!run_report_dir.empty()) cfg.report_dir = run_report_dir;
      if (run_end >= 0) cfg.end_time = run_end;

      auto report = sc::run_pipeline(cfg);
      std::cout << report.to_text();
    } else if (*cor) {
      sc::Store store(cor_data_dir);
      auto tags = cor_tags.empty() ? store.stream_tags() : cor_tags;
      if (tags.empty()) throw std::runtime_error("store has no streams");
      std::cout << matrix_from_store(store, tags, effective_time(cor_at)).to_text();
    } else if (*tree) {
      sc::Store store(tree_data_dir);
      auto tags = store.stream_tags();
      if (tags.size() < 2) throw std::runtime_error("need at least two streams");
      auto m = matrix_from_store(store, tags, effective_time(tree_at));
      auto d = sc::distance_from_correlation(m);
      auto t = sc::neighbor_joining(tags, d);
      auto newick = sc::to_newick(t);
      std::cout << newick << "\n";
      if (!tree_out.empty()) {
        std::ofstream out(tree_out, std::ios::trunc);
        out << newick << "\n";
      }
    } else if (*td) {
      auto a = sc::parse_newick(read_text_file(td_a));
      auto b = sc::parse_newick(read_text_file(td_b));
      if (td_k < 1) throw std::runtime_error("--k must be >= 1");
      std::cout << sc::tree_move_distance(a, b, static_cast<int>(td_k)) << "\n";
    } else if (*sr) {
      sc::Store store(sr_data_dir);
      sc::PhyloTree tree_obj;
      bool have_tree = false;
      if (!sr_tree.empty()) {
        tree_obj = sc::parse_newick(read_text_file(sr_tree));
        have_tree = true;
      }
      auto result = sc::search(store, have_tree ? &tree_obj : nullptr, sr_tags, sr_at,
                               static_cast<std::size_t>(sr_limit),
                               static_cast<int>(sr_horizon));
      if (result.status == sc::SearchStatus::unknown_tags) {
        std::cout << "no results: unknown tags\n";
        return 2;
      }
      int rank = 1;
      for (const auto& hit : result.hits) {
        std::cout << rank++ << '\t' << hit.tag << '\t';
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", hit.score);
        std::cout << buf << '\t' << hit.degree << '\t';
        for (std::size_t i = 0; i < hit.explanation.size(); ++i) {
          const auto& [name, stream, ts] = hit.explanation[i];
          if (i) std::cout << ' ';
          std::cout << name << '@' << stream;
        }
        std::cout << '\n';
      }
      if (result.hits.empty()) std::cout << "no results\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
