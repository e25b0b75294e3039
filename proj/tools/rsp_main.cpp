#include "rsp/baselines.hpp"
#include "rsp/clustering.hpp"
#include "rsp/io.hpp"
#include "rsp/metrics.hpp"
#include "rsp/sensing.hpp"
#include "rsp/solver.hpp"
#include "rsp/svd.hpp"
#include "rsp/sweep.hpp"
#include "rsp/synth.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

using rsp::Index;
using rsp::Matrix;

constexpr const char* kVersion = "rsp 1.0.0";

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string format = "csv";
  bool no_timing = false;
  std::filesystem::path base_dir;
};

rsp::MatrixFormat parse_format(const std::string& f) {
  if (f == "csv") return rsp::MatrixFormat::kCsv;
  if (f == "bin") return rsp::MatrixFormat::kBinary;
  throw std::invalid_argument("unknown format '" + f + "' (expected csv or bin)");
}

// Output paths resolve against --out; a relative --out resolves against
// RSP_OUT_DIR when that is set, so batch jobs can redirect everything at once.
std::filesystem::path resolve_out(const GlobalOpts& g, const std::string& out) {
  if (out.empty()) return g.base_dir;
  const std::filesystem::path p(out);
  return p.is_absolute() ? p : g.base_dir / p;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw rsp::IoError("cannot create " + dir.string() + ": " + ec.message());
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0, bool enabled) {
  if (!enabled) return 0.0;
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> parse_grid(const std::string& text) {
  // Either an explicit comma list ("1,2,5") or an inclusive range
  // "lo:hi[:step]" with step defaulting to 1.
  const auto to_double = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse grid number '" + s + "'");
    }
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t colon = text.find(':', pos);
      parts.push_back(text.substr(pos, colon == std::string::npos ? colon : colon - pos));
      if (colon == std::string::npos) break;
      pos = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) {
      throw std::invalid_argument("grid range must be lo:hi or lo:hi:step, got '" + text + "'");
    }
    const double lo = to_double(parts[0]);
    const double hi = to_double(parts[1]);
    const double step = parts.size() == 3 ? to_double(parts[2]) : 1.0;
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      if (comma > pos) out.push_back(to_double(text.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty grid '" + text + "'");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

struct SynthArgs {
  Index m = 200, k = 2, per_class = 100, dim = 1;
  double corruption = 0.0;
  std::string out;
};

int cmd_synth(const GlobalOpts& g, const SynthArgs& a) {
  rsp::SynConfig cfg;
  cfg.ambient_dim = a.m;
  cfg.num_classes = a.k;
  cfg.n_per_class = a.per_class;
  cfg.subspace_dim = a.dim;
  cfg.corruption_size = a.corruption;
  cfg.seed = g.seed;
  const rsp::SynInstance inst = rsp::generate(cfg);

  const auto dir = resolve_out(g, a.out);
  ensure_dir(dir);
  const rsp::MatrixFormat fmt = parse_format(g.format);
  const std::string ext = rsp::format_extension(fmt);
  rsp::write_matrix(dir / ("clean" + ext), inst.clean, fmt);
  rsp::write_matrix(dir / ("corruption" + ext), inst.corruption, fmt);
  rsp::write_matrix(dir / ("observed" + ext), inst.observed, fmt);
  rsp::write_labels(dir / "labels.csv", inst.labels);

  nlohmann::json manifest;
  manifest["ambient_dim"] = cfg.ambient_dim;
  manifest["num_classes"] = cfg.num_classes;
  manifest["n_per_class"] = cfg.n_per_class;
  manifest["subspace_dim"] = cfg.subspace_dim;
  manifest["corruption_size"] = cfg.corruption_size;
  manifest["seed"] = cfg.seed;
  manifest["n"] = inst.clean.cols();
  manifest["true_rank"] = inst.true_rank;
  manifest["corruption_count"] = inst.corruption_count;
  manifest["format"] = g.format;
  manifest["files"] = {{"clean", "clean" + ext},
                       {"corruption", "corruption" + ext},
                       {"observed", "observed" + ext},
                       {"labels", "labels.csv"}};
  rsp::write_json_atomic(dir / "manifest.json", manifest);
  std::cout << "synth: n=" << inst.clean.cols() << " true_rank=" << inst.true_rank
            << " corrupted_entries=" << inst.corruption_count << " -> " << dir.string() << "\n";
  return 0;
}

struct CompressArgs {
  std::string input, sensing, out;
  Index p = 50;
};

int cmd_compress(const GlobalOpts& g, const CompressArgs& a) {
  const Matrix x = rsp::read_matrix(std::filesystem::path(a.input));
  rsp::SensingMatrix sensing = a.sensing.empty()
                                   ? rsp::make_sensing(a.p, x.rows(), g.seed)
                                   : rsp::sensing_from_matrix(rsp::read_matrix(a.sensing), g.seed);
  const Matrix m_mat = rsp::compress(sensing, x);

  const auto dir = resolve_out(g, a.out);
  ensure_dir(dir);
  const rsp::MatrixFormat fmt = parse_format(g.format);
  const std::string ext = rsp::format_extension(fmt);
  rsp::write_matrix(dir / ("sensing" + ext), sensing.matrix, fmt);
  rsp::write_matrix(dir / ("compressed" + ext), m_mat, fmt);
  nlohmann::json manifest;
  manifest["p"] = sensing.p();
  manifest["m"] = sensing.m();
  manifest["n"] = m_mat.cols();
  manifest["seed"] = sensing.seed;
  manifest["input"] = a.input;
  manifest["reused_sensing"] = !a.sensing.empty();
  manifest["format"] = g.format;
  rsp::write_json_atomic(dir / "manifest.json", manifest);
  std::cout << "compress: " << sensing.m() << " -> " << sensing.p() << " rows, n=" << m_mat.cols()
            << " -> " << dir.string() << "\n";
  return 0;
}

struct SolveArgs {
  std::string input, sensing, out;
  std::uint64_t sensing_seed = 0;
  Index sensing_m = 0;
  Index rank = 2;
  double lambda = 1.0 / 128.0;
  int max_iters = 1000;
  double tol = 1e-6;
  bool normalize = false;
};

int cmd_solve(const GlobalOpts& g, const SolveArgs& a) {
  Matrix m_mat = rsp::read_matrix(std::filesystem::path(a.input));
  rsp::SensingMatrix sensing;
  if (!a.sensing.empty()) {
    sensing = rsp::sensing_from_matrix(rsp::read_matrix(a.sensing));
  } else {
    if (a.sensing_m < 1) {
      throw std::invalid_argument("solve: need --sensing FILE, or --sensing-seed with --sensing-m");
    }
    sensing = rsp::make_sensing(m_mat.rows(), a.sensing_m, a.sensing_seed);
  }
  if (a.normalize) {
    for (Index j = 0; j < m_mat.cols(); ++j) {
      const double norm = m_mat.col(j).norm();
      if (norm > 0.0) m_mat.col(j) /= norm;
    }
  }

  rsp::RspParams params;
  params.rank = a.rank;
  params.lambda = a.lambda;
  params.max_iters = a.max_iters;
  params.tol = a.tol;
  const auto t0 = std::chrono::steady_clock::now();
  const rsp::RspSolution sol = rsp::solve(m_mat, sensing, params);
  const double wall = elapsed_ms(t0, !g.no_timing);

  const auto dir = resolve_out(g, a.out);
  ensure_dir(dir);
  const rsp::MatrixFormat fmt = parse_format(g.format);
  const std::string ext = rsp::format_extension(fmt);
  rsp::write_matrix(dir / ("rowspace" + ext), sol.row_space.basis, fmt);
  rsp::write_matrix(dir / ("sparse" + ext), sol.sparse, fmt);
  std::string trace;
  for (double v : sol.objective_trace) trace += rsp::format_double(v) + "\n";
  rsp::write_text_atomic(dir / "objective_trace.csv", trace);

  nlohmann::json report;
  report["iterations"] = sol.iterations;
  report["converged"] = sol.converged;
  report["rho"] = sol.rho;
  report["final_objective"] = sol.objective_trace.empty() ? 0.0 : sol.objective_trace.back();
  report["rank"] = params.rank;
  report["lambda"] = params.lambda;
  report["max_iters"] = params.max_iters;
  report["tol"] = params.tol;
  report["normalize"] = a.normalize;
  report["wall_ms"] = wall;
  rsp::write_json_atomic(dir / "report.json", report);
  std::cout << "solve: iterations=" << sol.iterations << " converged=" << (sol.converged ? 1 : 0)
            << " -> " << dir.string() << "\n";
  return 0;
}

struct ClusterArgs {
  std::string rowspace, out;
  int k = 2;
};

int cmd_cluster(const GlobalOpts& g, const ClusterArgs& a) {
  const Matrix v = rsp::read_matrix(std::filesystem::path(a.rowspace));
  const auto t0 = std::chrono::steady_clock::now();
  const rsp::ClusterAssignment ca = rsp::kmeans(v, a.k, g.seed);
  const double wall = elapsed_ms(t0, !g.no_timing);

  const auto dir = resolve_out(g, a.out);
  ensure_dir(dir);
  rsp::write_labels(dir / "labels_pred.csv", ca.labels);
  nlohmann::json report;
  report["k"] = a.k;
  report["seed"] = g.seed;
  report["inertia"] = ca.inertia;
  report["restarts_used"] = ca.restarts_used;
  report["wall_ms"] = wall;
  rsp::write_json_atomic(dir / "cluster_report.json", report);
  std::cout << "cluster: k=" << a.k << " inertia=" << rsp::format_double(ca.inertia) << " -> "
            << dir.string() << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string truth, pred, v_true, v_est, s_true, s_est, out;
  double support_threshold = -1.0;  // negative = relative 1e-3 * max|s_est|
};

int cmd_evaluate(const GlobalOpts& g, const EvaluateArgs& a) {
  if ((a.v_true.empty()) != (a.v_est.empty())) {
    throw std::invalid_argument("evaluate: --v-true and --v-est must be given together");
  }
  if ((a.s_true.empty()) != (a.s_est.empty())) {
    throw std::invalid_argument("evaluate: --s-true and --s-est must be given together");
  }
  nlohmann::json report;
  nlohmann::json timing;

  auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> truth = rsp::read_labels(a.truth);
  const std::vector<int> pred = rsp::read_labels(a.pred);
  timing["read_ms"] = elapsed_ms(t0, !g.no_timing);

  t0 = std::chrono::steady_clock::now();
  report["accuracy"] = rsp::accuracy(pred, truth);
  timing["accuracy_ms"] = elapsed_ms(t0, !g.no_timing);

  if (!a.v_true.empty()) {
    t0 = std::chrono::steady_clock::now();
    const rsp::RowSpaceBasis vt(rsp::read_matrix(a.v_true));
    const rsp::RowSpaceBasis ve(rsp::read_matrix(a.v_est));
    const double snr = rsp::projector_snr(vt, ve);
    report["snr_db"] = snr;
    report["score"] = rsp::score_of_snr(snr);
    timing["snr_ms"] = elapsed_ms(t0, !g.no_timing);
  }
  if (!a.s_true.empty()) {
    t0 = std::chrono::steady_clock::now();
    const Matrix st = rsp::read_matrix(a.s_true);
    const Matrix se = rsp::read_matrix(a.s_est);
    const double threshold =
        a.support_threshold >= 0.0
            ? a.support_threshold
            : 1e-3 * (se.size() > 0 ? se.cwiseAbs().maxCoeff() : 0.0);
    const auto pr = rsp::support_metrics(st, se, threshold);
    report["support_precision"] = pr.first;
    report["support_recall"] = pr.second;
    report["support_threshold"] = threshold;
    std::size_t nonzeros = 0;
    for (Index j = 0; j < se.cols(); ++j) {
      for (Index i = 0; i < se.rows(); ++i) nonzeros += se(i, j) != 0.0;
    }
    report["corruption_size"] = static_cast<double>(nonzeros) / static_cast<double>(se.cols());
    timing["support_ms"] = elapsed_ms(t0, !g.no_timing);
  }
  report["timing"] = timing;

  const auto out_path = a.out.empty() ? resolve_out(g, "report.json")
                                      : resolve_out(g, a.out);
  if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
  rsp::write_json_atomic(out_path, report);
  std::cout << "evaluate: accuracy=" << rsp::format_double(report["accuracy"].get<double>());
  if (report.contains("snr_db")) {
    std::cout << " snr_db=" << rsp::format_double(report["snr_db"].get<double>())
              << " score=" << rsp::format_double(report["score"].get<double>());
  }
  std::cout << " -> " << out_path.string() << "\n";
  return 0;
}

struct SweepArgs {
  std::string dims = "1:20";
  std::string corruptions = "0.4:8:0.4";
  Index p = 50, m = 200, per_class = 100, k = 2;
  int trials = 20;
  std::string methods = "rsp,sim,pca";
  double lambda = 1.0 / 128.0;
  Index rank = 0;
  int max_iters = 1000;
  double tol = 1e-6;
  bool normalize = false;
  bool resume = false;
  std::string out;
};

int cmd_sweep(const GlobalOpts& g, const SweepArgs& a) {
  rsp::SweepConfig cfg;
  cfg.dims.clear();
  for (double d : parse_grid(a.dims)) {
    const double rounded = std::llround(d);
    if (std::abs(d - rounded) > 1e-9 || rounded < 1) {
      throw std::invalid_argument("sweep: --dims must contain positive integers");
    }
    cfg.dims.push_back(static_cast<Index>(rounded));
  }
  cfg.corruptions = parse_grid(a.corruptions);
  cfg.p = a.p;
  cfg.m = a.m;
  cfg.n_per_class = a.per_class;
  cfg.k = a.k;
  cfg.trials = a.trials;
  cfg.base_seed = g.seed;
  cfg.methods = split_list(a.methods);
  cfg.lambda = a.lambda;
  cfg.rank_override = a.rank;
  cfg.max_iters = a.max_iters;
  cfg.tol = a.tol;
  cfg.normalize = a.normalize;
  cfg.threads = g.threads;
  cfg.record_timing = !g.no_timing;

  const auto dir = resolve_out(g, a.out);
  const rsp::SweepResult result = rsp::run_sweep(cfg, dir, a.resume, &std::cerr);
  std::cout << "sweep: " << result.records.size() << " records across "
            << result.aggregates.size() << " cell-method aggregates -> " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row space pursuit: compressive robust subspace clustering harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOpts g;
  if (const char* env = std::getenv("RSP_OUT_DIR"); env != nullptr && *env != '\0') {
    g.base_dir = env;
  } else {
    g.base_dir = ".";
  }
  app.add_option("--seed", g.seed, "Base seed for all randomized stages")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for sweeps (0 = logical cores)")
      ->capture_default_str();
  app.add_option("--format", g.format, "Matrix file format: csv or bin")
      ->check(CLI::IsMember({"csv", "bin"}))
      ->capture_default_str();
  app.add_flag("--no-timing", g.no_timing,
               "Zero all wall-clock fields in outputs (for byte-exact comparisons)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic union-of-subspaces instance");
  synth->fallthrough();
  synth->add_option("--m", synth_args.m, "Ambient dimension")->capture_default_str();
  synth->add_option("--k", synth_args.k, "Number of subspaces")->capture_default_str();
  synth->add_option("--per-class", synth_args.per_class, "Points per subspace")
      ->capture_default_str();
  synth->add_option("--dim", synth_args.dim, "Dimension of each subspace")->capture_default_str();
  synth->add_option("--corruption", synth_args.corruption,
                    "Corruption size (corrupted entries per column)")
      ->capture_default_str();
  synth->add_option("--out", synth_args.out, "Output directory");

  CompressArgs compress_args;
  auto* compress = app.add_subcommand("compress", "Project a data matrix with a sensing matrix");
  compress->fallthrough();
  compress->add_option("--input", compress_args.input, "Data matrix (m x n)")->required();
  compress->add_option("--p", compress_args.p, "Projected dimension")->capture_default_str();
  compress->add_option("--sensing", compress_args.sensing,
                       "Existing sensing matrix to reuse instead of generating one");
  compress->add_option("--out", compress_args.out, "Output directory");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Recover row space and sparse corruption from M = RX");
  solve->fallthrough();
  solve->add_option("--input", solve_args.input, "Compressed matrix M (p x n)")->required();
  solve->add_option("--sensing", solve_args.sensing, "Sensing matrix file (p x m)");
  solve->add_option("--sensing-seed", solve_args.sensing_seed,
                    "Regenerate the sensing matrix from this seed")
      ->capture_default_str();
  solve->add_option("--sensing-m", solve_args.sensing_m,
                    "Ambient dimension m when regenerating the sensing matrix");
  solve->add_option("--r", solve_args.rank, "Target row-space rank")->capture_default_str();
  solve->add_option("--lambda", solve_args.lambda, "Sparsity weight")->capture_default_str();
  solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap")->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "Relative-change stopping tolerance")
      ->capture_default_str();
  solve->add_flag("--normalize", solve_args.normalize, "Column-normalize M before solving");
  solve->add_option("--out", solve_args.out, "Output directory");

  ClusterArgs cluster_args;
  auto* cluster = app.add_subcommand("cluster", "K-means on the rows of a recovered row space");
  cluster->fallthrough();
  cluster->add_option("--rowspace", cluster_args.rowspace, "Row-space basis matrix (n x r)")
      ->required();
  cluster->add_option("--k", cluster_args.k, "Cluster count")->capture_default_str();
  cluster->add_option("--out", cluster_args.out, "Output directory");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate->fallthrough();
  evaluate->add_option("--truth", eval_args.truth, "True labels CSV")->required();
  evaluate->add_option("--pred", eval_args.pred, "Predicted labels CSV")->required();
  evaluate->add_option("--v-true", eval_args.v_true, "True row-space basis");
  evaluate->add_option("--v-est", eval_args.v_est, "Estimated row-space basis");
  evaluate->add_option("--s-true", eval_args.s_true, "True sparse corruption");
  evaluate->add_option("--s-est", eval_args.s_est, "Estimated sparse corruption");
  evaluate->add_option("--support-threshold", eval_args.support_threshold,
                       "Absolute support threshold (default: 1e-3 * max|estimate|)");
  evaluate->add_option("--out", eval_args.out, "Report path (default report.json)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Phase-transition grid experiment");
  sweep->fallthrough();
  sweep->add_option("--dims", sweep_args.dims, "Subspace-dim grid: list or lo:hi[:step]")
      ->capture_default_str();
  sweep->add_option("--corruptions", sweep_args.corruptions,
                    "Corruption-size grid: list or lo:hi[:step]")
      ->capture_default_str();
  sweep->add_option("--p", sweep_args.p, "Projected dimension")->capture_default_str();
  sweep->add_option("--m", sweep_args.m, "Ambient dimension")->capture_default_str();
  sweep->add_option("--per-class", sweep_args.per_class, "Points per subspace")
      ->capture_default_str();
  sweep->add_option("--k", sweep_args.k, "Number of subspaces")->capture_default_str();
  sweep->add_option("--trials", sweep_args.trials, "Trials per cell")->capture_default_str();
  sweep->add_option("--methods", sweep_args.methods, "Comma list from {rsp,sim,pca}")
      ->capture_default_str();
  sweep->add_option("--lambda", sweep_args.lambda, "Sparsity weight for rsp")
      ->capture_default_str();
  sweep->add_option("--r", sweep_args.rank, "Rank override (0 = true rank)")
      ->capture_default_str();
  sweep->add_option("--max-iters", sweep_args.max_iters, "Solver iteration cap")
      ->capture_default_str();
  sweep->add_option("--tol", sweep_args.tol, "Solver stopping tolerance")->capture_default_str();
  sweep->add_flag("--normalize", sweep_args.normalize, "Column-normalize solver inputs");
  sweep->add_flag("--resume", sweep_args.resume, "Continue from an existing checkpoint");
  sweep->add_option("--out", sweep_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(g, synth_args);
    if (compress->parsed()) return cmd_compress(g, compress_args);
    if (solve->parsed()) return cmd_solve(g, solve_args);
    if (cluster->parsed()) return cmd_cluster(g, cluster_args);
    if (evaluate->parsed()) return cmd_evaluate(g, eval_args);
    if (sweep->parsed()) return cmd_sweep(g, sweep_args);
  } catch (const rsp::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
