// fseval: few-shot evaluation harness.
//
// Subcommands: ingest-check, run, compare, sweep, fit, report.
// Exit codes: 0 success, 2 config error, 3 data error, 4 insufficient tasks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fse/csv.hpp"
#include "fse/errors.hpp"
#include "fse/protocol.hpp"
#include "fse/report.hpp"
#include "fse/sampler.hpp"
#include "fse/variance_lab.hpp"

namespace {

struct CommonOpts {
  std::string input;        // feature CSV path
  std::string synth;        // "mu:sigma,mu:sigma,..."
  std::size_t synth_n = 1000;
  std::string mode = "depletion";
  int ways = 5, shots = 5, queries = 15, tasks = 0;
  std::string adapter = "ncc";
  bool normalize = false;
  double lr_l2 = 1e-3, lr_step = 0.5;
  int lr_iters = 200;
  double oracle_base = 0.8, oracle_difficulty = 0.1, oracle_noise = 0.05;
  std::string oracle_salt = "oracle";
  double p_limit = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string method;
};

fse::SynthConfig parse_synth(const CommonOpts& o) {
  fse::SynthConfig cfg;
  cfg.n_total = o.synth_n;
  cfg.seed = o.seed;
  std::istringstream in(o.synth);
  std::string part;
  while (std::getline(in, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos)
      throw fse::ConfigError("--synth expects mu:sigma pairs, got '" + part +
                             "'");
    fse::GaussianClassSpec g;
    g.mu = std::stod(part.substr(0, colon));
    g.sigma = std::stod(part.substr(colon + 1));
    cfg.class_specs.push_back(g);
  }
  cfg.validate();
  return cfg;
}

fse::LabeledPool load_input(const CommonOpts& o) {
  if (!o.input.empty()) return fse::ingest_feature_file(o.input);
  if (!o.synth.empty()) return fse::gen_gaussian_pool(parse_synth(o));
  throw fse::ConfigError("provide --input CSV or --synth class specs");
}

fse::Adapter make_adapter(const CommonOpts& o) {
  if (o.adapter == "ncc") return fse::Adapter::ncc(o.normalize);
  if (o.adapter == "lr")
    return fse::Adapter::logistic({o.lr_l2, o.lr_step, o.lr_iters},
                                  o.normalize);
  if (o.adapter == "oracle")
    return fse::Adapter::make_oracle(
        {o.oracle_base, o.oracle_difficulty, o.oracle_noise, o.oracle_salt});
  throw fse::ConfigError("unknown adapter '" + o.adapter +
                         "' (ncc | lr | oracle)");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fse::DataError("cannot write '" + path + "'");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fse::DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_common(CLI::App* cmd, CommonOpts& o, bool need_seed) {
  cmd->add_option("--input", o.input, "feature CSV (header label,f0,...)");
  cmd->add_option("--synth", o.synth, "synthetic classes as mu:sigma,...");
  cmd->add_option("--synth-n", o.synth_n, "synthetic dataset size");
  cmd->add_option("--mode", o.mode, "with_replacement | depletion");
  cmd->add_option("--ways", o.ways);
  cmd->add_option("--shots", o.shots);
  cmd->add_option("--queries", o.queries);
  cmd->add_option("--tasks", o.tasks, "task count (with_replacement only)");
  cmd->add_option("--adapter", o.adapter, "ncc | lr | oracle");
  cmd->add_flag("--normalize", o.normalize, "L2-normalize features");
  cmd->add_option("--lr-l2", o.lr_l2);
  cmd->add_option("--lr-step", o.lr_step);
  cmd->add_option("--lr-iters", o.lr_iters);
  cmd->add_option("--oracle-base", o.oracle_base);
  cmd->add_option("--oracle-difficulty", o.oracle_difficulty);
  cmd->add_option("--oracle-noise", o.oracle_noise);
  cmd->add_option("--oracle-salt", o.oracle_salt);
  cmd->add_option("--p-limit", o.p_limit);
  auto* seed = cmd->add_option("--seed", o.seed, "master seed (no default)");
  if (need_seed) seed->required();
  cmd->add_option("--threads", o.threads);
  cmd->add_option("--out", o.out, "output path");
  cmd->add_option("--method", o.method, "method id stored in the manifest");
  cmd->set_config("--config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistically sound few-shot evaluation"};
  app.require_subcommand(1);

  CommonOpts o;

  auto* ingest = app.add_subcommand("ingest-check",
                                    "validate a feature CSV and print stats");
  auto* run = app.add_subcommand("run", "sample, evaluate, save a manifest");
  auto* compare =
      app.add_subcommand("compare", "significance matrix from manifests");
  auto* sweep = app.add_subcommand("sweep", "Var(Abar) vs Q on synthetic data");
  auto* fit = app.add_subcommand("fit", "fit the variance model to a sweep CSV");
  auto* report =
      app.add_subcommand("report", "conclusiveness counts from matrix JSONs");

  add_common(ingest, o, false);
  add_common(run, o, true);
  add_common(sweep, o, true);

  std::vector<std::string> manifest_paths;
  std::string format = "table_text";
  compare->add_option("manifests", manifest_paths, "manifest files")
      ->required()
      ->expected(2, -1);
  compare->add_option("--p-limit", o.p_limit);
  compare->add_option("--out", o.out);
  compare->add_option("--format", format, "table_text | machine_json");

  std::string sweep_csv;
  int reps = 200;
  std::string q_list;
  sweep->add_option("--reps", reps, "repetitions per Q");
  sweep->add_option("--q-grid", q_list, "comma-separated Q values");

  std::size_t fit_n = 0;
  int fit_c = 0, fit_k = 0;
  fit->add_option("sweep_csv", sweep_csv, "sweep CSV file")->required();
  fit->add_option("--ways", fit_k)->required();
  fit->add_option("--n-total", fit_n, "dataset size (N*C)")->required();
  fit->add_option("--classes", fit_c)->required();
  fit->add_option("--out", o.out);

  std::vector<std::string> matrix_paths;
  report->add_option("matrices", matrix_paths, "matrix JSON files")
      ->required();
  report->add_option("--out", o.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      auto pool = load_input(o);
      std::cout << "classes: " << pool.class_count()
                << "\nsamples: " << pool.total_samples()
                << "\ndim: " << pool.dim << "\npool_hash: " << pool.hash()
                << "\n";
      return 0;
    }
    if (*run) {
      auto pool = load_input(o);
      fse::ProtocolConfig cfg;
      cfg.mode = fse::sampling_mode_from_string(o.mode);
      cfg.spec.ways = o.ways;
      cfg.spec.shots = o.shots;
      cfg.spec.queries = o.queries;
      if (o.tasks > 0) cfg.spec.task_count = o.tasks;
      cfg.adapter = make_adapter(o);
      cfg.method_id = o.method.empty() ? o.adapter : o.method;
      cfg.p_limit = o.p_limit;
      cfg.master_seed = o.seed;
      cfg.threads = o.threads;
      auto result = fse::run_protocol(cfg, pool);
      std::printf("T = %zu tasks\n%s CI: %.6f +- %.6f\n",
                  result.manifest.tasks.size(),
                  cfg.mode == fse::SamplingMode::WithReplacement ? "closed"
                                                                 : "open",
                  result.interval.mean, result.interval.half_width);
      if (!o.out.empty()) fse::save_manifest(result.manifest, o.out);
      return 0;
    }
    if (*compare) {
      std::vector<fse::RunManifest> manifests;
      for (const auto& p : manifest_paths)
        manifests.push_back(fse::load_manifest(p));
      auto matrix = fse::compare_runs(manifests, o.p_limit);
      std::string text = format == "machine_json"
                             ? fse::matrix_to_json(matrix)
                             : fse::matrix_to_text(matrix);
      if (o.out.empty())
        std::cout << text;
      else
        write_file(o.out, text);
      return 0;
    }
    if (*sweep) {
      auto cfg = parse_synth(o);
      auto adapter = make_adapter(o);
      std::vector<int> grid;
      if (q_list.empty()) {
        grid = fse::default_q_grid(cfg, o.ways, o.shots);
      } else {
        std::istringstream in(q_list);
        std::string part;
        while (std::getline(in, part, ',')) grid.push_back(std::stoi(part));
      }
      auto points =
          fse::sweep_variance(cfg, o.ways, o.shots, grid, reps, adapter,
                              o.threads);
      std::string csv = fse::sweep_to_csv(points);
      if (o.out.empty())
        std::cout << csv;
      else
        write_file(o.out, csv);
      return 0;
    }
    if (*fit) {
      auto points = fse::sweep_from_csv(read_file(sweep_csv));
      auto model = fse::fit_variance_model(points, fit_k, fit_n,
                                           static_cast<std::size_t>(fit_c));
      fse::QStar q = fse::q_star(model);
      std::string text = fse::fit_to_text(model, q);
      if (o.out.empty())
        std::cout << text;
      else
        write_file(o.out, text);
      return 0;
    }
    if (*report) {
      std::vector<fse::SignificanceMatrix> matrices;
      for (const auto& p : matrix_paths)
        matrices.push_back(fse::matrix_from_json(read_file(p)));
      auto rep = fse::conclusiveness_report(matrices);
      std::string text = fse::report_to_text(rep);
      if (o.out.empty())
        std::cout << text;
      else
        write_file(o.out, text);
      return 0;
    }
  } catch (const fse::InsufficientTasksError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const fse::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fse::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
