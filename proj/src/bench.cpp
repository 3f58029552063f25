#include "countgraph/bench.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "countgraph/errors.hpp"
#include "countgraph/io.hpp"
#include "countgraph/rng.hpp"

namespace countgraph {

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

TopologySpec::Kind parse_topology_kind(const std::string& name, const std::string& where) {
  if (name == "scale-free" || name == "scalefree") return TopologySpec::Kind::ScaleFree;
  if (name == "hub") return TopologySpec::Kind::Hub;
  if (name == "random") return TopologySpec::Kind::Random;
  throw IoError(where + ": unknown topology '" + name + "'");
}

}  // namespace

std::string topology_name(TopologySpec::Kind kind) {
  switch (kind) {
    case TopologySpec::Kind::ScaleFree: return "scale-free";
    case TopologySpec::Kind::Hub: return "hub";
    case TopologySpec::Kind::Random: return "random";
  }
  return "?";
}

std::string family_name(FamilyChoice family) {
  switch (family) {
    case FamilyChoice::TruncatedAuto:
    case FamilyChoice::TruncatedFixed: return "truncated";
    case FamilyChoice::Poisson: return "poisson";
  }
  return "?";
}

BenchSpec parse_bench_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }

  BenchSpec spec;
  try {
    spec.alpha = j.value("alpha", 0.01);
    const std::string fam = j.value("family", "truncated");
    spec.truncation = j.value("truncation", 0);
    if (fam == "poisson") {
      spec.family = FamilyChoice::Poisson;
    } else if (fam == "truncated") {
      spec.family = spec.truncation > 0 ? FamilyChoice::TruncatedFixed : FamilyChoice::TruncatedAuto;
    } else {
      throw IoError(path + ": unknown family '" + fam + "'");
    }
    spec.max_cond_size = j.value("m", -1);
    spec.include_intercept = j.value("intercept", false);
    spec.wald_literal = j.value("wald_literal", false);

    if (!j.contains("configs") || !j["configs"].is_array() || j["configs"].empty())
      throw IoError(path + ": 'configs' must be a nonempty array");
    int idx = 0;
    for (const auto& cj : j["configs"]) {
      const std::string where = path + ": configs[" + std::to_string(idx) + "]";
      BenchConfig c;
      if (!cj.contains("topology")) throw IoError(where + ": missing 'topology'");
      c.topology.kind = parse_topology_kind(cj["topology"].get<std::string>(), where);
      if (!cj.contains("p")) throw IoError(where + ": missing 'p'");
      c.topology.p = cj["p"].get<int>();
      c.topology.power = cj.value("power", 1.0);
      c.topology.n_hubs = cj.value("hubs", 1);
      c.topology.edge_prob = cj.value("edge_prob", 0.1);
      if (!cj.contains("n")) throw IoError(where + ": missing 'n'");
      c.n = cj["n"].get<long>();
      c.lambda_true = cj.value("lambda_true", 1.0);
      c.lambda_noise = cj.value("lambda_noise", 0.5);
      c.topology.validate();
      if (c.n < 1) throw IoError(where + ": n must be >= 1");
      if (!(c.lambda_true > 0.0) || !(c.lambda_noise > 0.0))
        throw IoError(where + ": rates must be positive");
      spec.configs.push_back(c);
      ++idx;
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw IoError(path + ": alpha must lie in (0,1)");
  return spec;
}

SkeletonOptions bench_skeleton_options(const BenchSpec& spec, const CountMatrix& data) {
  SkeletonOptions opt;
  opt.alpha = spec.alpha;
  opt.max_cond_size = spec.max_cond_size;
  opt.include_intercept = spec.include_intercept;
  opt.wald_literal = spec.wald_literal;
  opt.execution = Execution::Sequential;
  switch (spec.family) {
    case FamilyChoice::Poisson:
      opt.family = CountFamily::poisson();
      break;
    case FamilyChoice::TruncatedFixed:
      opt.family = CountFamily::truncated_poisson(spec.truncation);
      break;
    case FamilyChoice::TruncatedAuto:
      opt.family = CountFamily::truncated_poisson(std::max(1, data.max_count()));
      break;
  }
  return opt;
}

std::vector<Confusion> run_bench_config(const BenchSpec& spec, const BenchConfig& config,
                                        std::uint64_t config_seed, long replicates,
                                        int threads) {
  if (replicates < 1) throw UsageError("run_bench_config: replicates must be >= 1");
  Rng truth_rng = Rng::substream(config_seed, 0);
  const UndirectedGraph truth = gen_topology(config.topology, truth_rng);

  std::vector<Confusion> confusions(static_cast<std::size_t>(replicates));
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (true) {
      const long r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        SimConfig sim;
        sim.topology = config.topology;
        sim.n = config.n;
        sim.lambda_true = config.lambda_true;
        sim.lambda_noise = config.lambda_noise;
        Rng rng = Rng::substream(config_seed, static_cast<std::uint64_t>(r) + 1);
        const CountMatrix data = simulate_counts(truth, sim, rng);
        const SkeletonOptions opt = bench_skeleton_options(spec, data);
        const SkeletonResult res = learn_skeleton(data, opt);
        confusions[static_cast<std::size_t>(r)] = confusion(truth, res.graph);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  const int count = std::max(1, std::min<int>(threads, static_cast<int>(replicates)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return confusions;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec, long replicates, std::uint64_t seed,
                                int threads) {
  std::vector<BenchRow> rows;
  rows.reserve(spec.configs.size());
  for (std::size_t ci = 0; ci < spec.configs.size(); ++ci) {
    const std::uint64_t config_seed =
        Rng::mix64(seed ^ Rng::mix64((static_cast<std::uint64_t>(ci) + 1) * 0x9E3779B97F4A7C15ULL));
    const auto confusions =
        run_bench_config(spec, spec.configs[ci], config_seed, replicates, threads);
    rows.push_back({spec.configs[ci], aggregate(confusions)});
  }
  return rows;
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows,
                     const BenchSpec& spec, long replicates) {
  std::ofstream outf(path);
  if (!outf) throw IoError("cannot write '" + path + "'");
  outf << "topology,p,n,lambda_true,lambda_noise,alpha,family,replicates,"
          "tp_mean,tp_sd,fp_mean,fp_sd,fn_mean,fn_sd,"
          "ppv_mean,ppv_sd,ppv_undefined,se_mean,se_sd,se_undefined\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    outf << topology_name(row.config.topology.kind) << ',' << row.config.topology.p << ','
         << row.config.n << ',' << format_double(row.config.lambda_true, 3) << ','
         << format_double(row.config.lambda_noise, 3) << ',' << format_double(spec.alpha, 4)
         << ',' << family_name(spec.family) << ',' << replicates << ','
         << format_double(s.tp.mean) << ',' << format_double(s.tp.sd) << ','
         << format_double(s.fp.mean) << ',' << format_double(s.fp.sd) << ','
         << format_double(s.fn.mean) << ',' << format_double(s.fn.sd) << ','
         << format_double(s.ppv.mean) << ',' << format_double(s.ppv.sd) << ','
         << s.ppv.excluded << ',' << format_double(s.se.mean) << ','
         << format_double(s.se.sd) << ',' << s.se.excluded << '\n';
  }
  if (!outf) throw IoError("failed writing '" + path + "'");
}

}  // namespace countgraph
