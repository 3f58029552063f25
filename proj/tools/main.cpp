#include <chrono>
#include <clocale>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "countgraph/bench.hpp"
#include "countgraph/errors.hpp"
#include "countgraph/io.hpp"
#include "countgraph/preprocess.hpp"
#include "countgraph/version.hpp"
#include "countgraph/wald.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace countgraph;

namespace {

// Exit codes: 0 success, 2 input format error, 3 data/model error, 4 internal.
constexpr int kExitFormat = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return std::stod(v);
  } catch (...) {
    throw UsageError(std::string(name) + ": cannot parse '" + v + "' as a number");
  }
}

int env_int(const char* name, int fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return std::stoi(v);
  } catch (...) {
    throw UsageError(std::string(name) + ": cannot parse '" + v + "' as an integer");
  }
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_manifest(const fs::path& path, const std::string& command, const json& options,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double seconds) {
  json m;
  m["command"] = command;
  m["engine_version"] = kVersion;
  m["options"] = options;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["duration_seconds"] = seconds;
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write '" + path.string() + "'");
  outf << m.dump(2) << '\n';
}

struct SimulateArgs {
  std::string topology;
  int p = 10;
  long n = 200;
  double power = 1.0;
  int hubs = 1;
  double edge_prob = 0.1;
  double lambda_true = 1.0;
  double lambda_noise = 0.5;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& a) {
  Stopwatch watch;
  TopologySpec topo;
  topo.p = a.p;
  topo.power = a.power;
  topo.n_hubs = a.hubs;
  topo.edge_prob = a.edge_prob;
  if (a.topology == "scale-free" || a.topology == "scalefree")
    topo.kind = TopologySpec::Kind::ScaleFree;
  else if (a.topology == "hub")
    topo.kind = TopologySpec::Kind::Hub;
  else if (a.topology == "random")
    topo.kind = TopologySpec::Kind::Random;
  else
    throw UsageError("unknown topology '" + a.topology + "'");
  topo.validate();

  fs::create_directories(a.out_dir);
  Rng graph_rng = Rng::substream(a.seed, 0);
  const UndirectedGraph truth = gen_topology(topo, graph_rng);

  SimConfig sim;
  sim.topology = topo;
  sim.n = a.n;
  sim.lambda_true = a.lambda_true;
  sim.lambda_noise = a.lambda_noise;
  sim.seed = a.seed;
  Rng data_rng = Rng::substream(a.seed, 1);
  const CountMatrix data = simulate_counts(truth, sim, data_rng);

  const fs::path dir(a.out_dir);
  write_counts_tsv((dir / "counts.tsv").string(), data);
  write_edge_list((dir / "truth.edges").string(), truth);

  json opts;
  opts["topology"] = a.topology;
  opts["p"] = a.p;
  opts["n"] = a.n;
  opts["power"] = a.power;
  opts["hubs"] = a.hubs;
  opts["edge_prob"] = a.edge_prob;
  opts["lambda_true"] = a.lambda_true;
  opts["lambda_noise"] = a.lambda_noise;
  opts["seed"] = a.seed;
  write_manifest(dir / "manifest.json", "simulate", opts, {},
                 {(dir / "counts.tsv").string(), (dir / "truth.edges").string()},
                 watch.seconds());
  std::cerr << "wrote " << (dir / "counts.tsv").string() << " (" << data.n() << " x "
            << data.p() << "), truth has " << truth.edge_count() << " edges\n";
  return 0;
}

struct LearnArgs {
  std::string counts_path;
  double alpha = 0.01;
  std::optional<double> alpha_d;
  std::string family = "truncated";
  int truncation = 0;  // 0 = max observed count
  int m = -1;
  bool intercept = true;
  int threads = 1;
  bool sequential = false;
  bool wald_literal = false;
  std::string out_dir;
};

int cmd_learn(const LearnArgs& a) {
  Stopwatch watch;
  const CountMatrix data = read_counts_tsv(a.counts_path);

  SkeletonOptions opt;
  opt.alpha = a.alpha_d ? alpha_schedule(data.n(), *a.alpha_d) : a.alpha;
  opt.max_cond_size = a.m;
  opt.include_intercept = a.intercept;
  opt.wald_literal = a.wald_literal;
  opt.execution = a.sequential ? Execution::Sequential : Execution::LevelParallel;
  opt.workers = a.threads;
  opt.fit_options.box_bound = env_double("COUNTGRAPH_BOX_BOUND", opt.fit_options.box_bound);
  if (a.family == "poisson") {
    opt.family = CountFamily::poisson();
  } else if (a.family == "truncated") {
    const int r = a.truncation > 0 ? a.truncation : std::max(1, data.max_count());
    opt.family = CountFamily::truncated_poisson(r);
  } else {
    throw UsageError("unknown family '" + a.family + "'");
  }

  const SkeletonResult result = learn_skeleton(data, opt);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_edge_list((dir / "estimate.edges").string(), result.graph);
  write_trace_jsonl((dir / "trace.jsonl").string(), result.trace);

  json opts;
  opts["counts"] = a.counts_path;
  opts["alpha"] = opt.alpha;
  if (a.alpha_d) opts["alpha_d"] = *a.alpha_d;
  opts["family"] = a.family;
  opts["truncation"] = opt.family.truncated() ? opt.family.truncation() : 0;
  opts["m"] = a.m;
  opts["intercept"] = a.intercept;
  opts["threads"] = a.threads;
  opts["sequential"] = a.sequential;
  opts["wald_literal"] = a.wald_literal;
  write_manifest(dir / "manifest.json", "learn", opts, {a.counts_path},
                 {(dir / "estimate.edges").string(), (dir / "trace.jsonl").string()},
                 watch.seconds());
  std::cerr << "estimated " << result.graph.edge_count() << " edges in "
            << result.levels_completed << " levels, " << result.tests_performed
            << " tests\n";
  return 0;
}

int cmd_eval(const std::string& truth_path, const std::string& estimate_path) {
  const auto truth_edges = read_edge_list(truth_path);
  const auto est_edges = read_edge_list(estimate_path);
  int p = 0;
  for (const auto& [u, v] : truth_edges) p = std::max(p, v + 1);
  for (const auto& [u, v] : est_edges) p = std::max(p, v + 1);
  p = std::max(p, 2);
  const Confusion c =
      confusion(graph_from_edges(truth_edges, p), graph_from_edges(est_edges, p));
  std::cout << "tp\tfp\tfn\tppv\tse\n"
            << c.tp << '\t' << c.fp << '\t' << c.fn << '\t'
            << (c.ppv ? format_double(*c.ppv) : "NA") << '\t'
            << (c.se ? format_double(*c.se) : "NA") << '\n';
  return 0;
}

struct BenchArgs {
  std::string spec_path;
  long replicates = 50;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
};

int cmd_bench(const BenchArgs& a) {
  Stopwatch watch;
  BenchSpec spec = parse_bench_spec(a.spec_path);
  spec.alpha = env_double("COUNTGRAPH_ALPHA", spec.alpha);
  const int env_r = env_int("COUNTGRAPH_R", 0);
  if (env_r > 0) {
    spec.truncation = env_r;
    if (spec.family == FamilyChoice::TruncatedAuto) spec.family = FamilyChoice::TruncatedFixed;
  }

  const auto rows = run_bench(spec, a.replicates, a.seed, a.threads);
  write_bench_csv(a.out_path, rows, spec, a.replicates);

  json opts;
  opts["spec"] = a.spec_path;
  opts["replicates"] = a.replicates;
  opts["seed"] = a.seed;
  opts["threads"] = a.threads;
  opts["alpha"] = spec.alpha;
  opts["family"] = family_name(spec.family);
  const fs::path manifest = fs::path(a.out_path).string() + ".manifest.json";
  write_manifest(manifest, "bench", opts, {a.spec_path}, {a.out_path}, watch.seconds());
  std::cerr << "wrote " << a.out_path << " (" << rows.size() << " rows x " << a.replicates
            << " replicates)\n";
  return 0;
}

struct PreprocessArgs {
  std::string in_path;
  std::string out_dir;
  double fraction = 0.25;
};

int cmd_preprocess(const PreprocessArgs& a) {
  Stopwatch watch;
  const auto [raw, names] = read_real_tsv(a.in_path);
  auto [counts, report] = preprocess_pipeline(raw, names, a.fraction);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_counts_tsv((dir / "counts.tsv").string(), counts);

  json rj;
  rj["chosen_alpha"] = report.chosen_alpha;
  rj["ks_statistic"] = report.ks_statistic;
  rj["kept_columns"] = report.kept_columns;
  rj["row_scale_factors"] = report.row_scale_factors;
  std::ofstream rf(dir / "report.json");
  if (!rf) throw IoError("cannot write report.json");
  rf << rj.dump(2) << '\n';

  json opts;
  opts["in"] = a.in_path;
  opts["fraction"] = a.fraction;
  write_manifest(dir / "manifest.json", "preprocess", opts, {a.in_path},
                 {(dir / "counts.tsv").string(), (dir / "report.json").string()},
                 watch.seconds());
  std::cerr << "kept " << counts.p() << " of " << raw.cols() << " columns, alpha="
            << format_double(report.chosen_alpha, 2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Structure learning for count data: PC-stable skeleton search over "
               "node-conditional truncated-Poisson/Poisson models"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a benchmark truth graph and counts");
  simulate->add_option("--topology", sim.topology, "scale-free | hub | random")->required();
  simulate->add_option("--p", sim.p, "number of variables")->required();
  simulate->add_option("--n", sim.n, "sample size")->required();
  simulate->add_option("--power", sim.power, "scale-free attachment exponent (1 = linear)");
  simulate->add_option("--hubs", sim.hubs, "hub count for the hub topology");
  simulate->add_option("--edge-prob", sim.edge_prob, "edge probability for the random topology");
  simulate->add_option("--lambda-true", sim.lambda_true, "latent rate");
  simulate->add_option("--lambda-noise", sim.lambda_noise, "noise rate (0.5 high SNR, 5 low)");
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out_dir, "output directory")->required();

  LearnArgs learn;
  learn.alpha = 0.01;
  auto* learn_cmd = app.add_subcommand("learn", "Estimate the skeleton from a counts matrix");
  learn_cmd->add_option("--counts", learn.counts_path, "counts TSV")->required();
  learn_cmd->add_option("--alpha", learn.alpha, "per-test significance level");
  double alpha_d_value = 0.0;
  auto* alpha_d_opt = learn_cmd->add_option(
      "--alpha-d", alpha_d_value, "use the schedule alpha_n = 2(1 - Phi(n^d)) with this d");
  learn_cmd->add_option("--family", learn.family, "truncated | poisson");
  learn_cmd->add_option("--R", learn.truncation, "truncation point (0 = max observed count)");
  learn_cmd->add_option("--m", learn.m, "max conditioning-set size (-1 = unbounded)");
  learn_cmd->add_flag("--intercept,!--no-intercept", learn.intercept,
                      "include an intercept in the local models (default on)");
  learn_cmd->add_option("--threads", learn.threads, "worker count for per-level tests");
  learn_cmd->add_flag("--sequential", learn.sequential,
                      "early-exit sequential execution instead of level-parallel");
  learn_cmd->add_flag("--wald-literal", learn.wald_literal,
                      "double-sqrt(n) reading of the test statistic (sensitivity analysis)");
  learn_cmd->add_option("--out", learn.out_dir, "output directory")->required();

  std::string truth_path, estimate_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score an estimated edge list against the truth");
  eval_cmd->add_option("--truth", truth_path, "truth edge list")->required();
  eval_cmd->add_option("--estimate", estimate_path, "estimated edge list")->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo benchmark: simulate, learn, score");
  bench_cmd->add_option("--spec", bench.spec_path, "bench spec JSON")->required();
  bench_cmd->add_option("--replicates", bench.replicates, "replicates per config");
  bench_cmd->add_option("--seed", bench.seed, "RNG seed");
  bench_cmd->add_option("--threads", bench.threads, "replicate-level worker count");
  bench_cmd->add_option("--out", bench.out_path, "output CSV path")->required();

  PreprocessArgs prep;
  auto* prep_cmd = app.add_subcommand(
      "preprocess", "Quantile-match, variance-filter and power-transform a raw matrix");
  prep_cmd->add_option("--in", prep.in_path, "raw TSV (real-valued)")->required();
  prep_cmd->add_option("--fraction", prep.fraction, "fraction of most-variable columns to keep");
  prep_cmd->add_option("--out", prep.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitFormat;
  }

  try {
    learn.alpha = env_double("COUNTGRAPH_ALPHA", learn.alpha);
    if (learn_cmd->count("--alpha") > 0) learn.alpha = learn_cmd->get_option("--alpha")->as<double>();
    if (alpha_d_opt->count() > 0) learn.alpha_d = alpha_d_value;
    if (learn.truncation == 0) learn.truncation = env_int("COUNTGRAPH_R", 0);

    if (*simulate) return cmd_simulate(sim);
    if (*learn_cmd) return cmd_learn(learn);
    if (*eval_cmd) return cmd_eval(truth_path, estimate_path);
    if (*bench_cmd) return cmd_bench(bench);
    if (*prep_cmd) return cmd_preprocess(prep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
