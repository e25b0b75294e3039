#include "rsp/sweep.hpp"

#include "rsp/baselines.hpp"
#include "rsp/clustering.hpp"
#include "rsp/metrics.hpp"
#include "rsp/rng.hpp"
#include "rsp/sensing.hpp"
#include "rsp/solver.hpp"
#include "rsp/svd.hpp"
#include "rsp/synth.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace rsp {

namespace {

constexpr const char* kTrialHeader =
    "cell,subspace_dim,corruption_size,p,trial,seed,method,snr_db,score,accuracy,iterations,wall_ms";
constexpr const char* kAggregateHeader =
    "cell,subspace_dim,corruption_size,p,method,trials,mean_snr_db,mean_score,mean_accuracy,mean_wall_ms";

bool known_method(const std::string& name) {
  return name == "rsp" || name == "sim" || name == "pca";
}

void validate(const SweepConfig& cfg) {
  if (cfg.dims.empty() || cfg.corruptions.empty()) {
    throw std::invalid_argument("sweep: grids must be non-empty");
  }
  if (cfg.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (cfg.m < 1 || cfg.n_per_class < 1 || cfg.k < 1) {
    throw std::invalid_argument("sweep: m, n_per_class and k must be positive");
  }
  if (cfg.p < 1 || cfg.p > cfg.m) throw std::invalid_argument("sweep: p must be in [1, m]");
  const Index n = cfg.k * cfg.n_per_class;
  for (Index d : cfg.dims) {
    if (d < 1 || d > cfg.m || cfg.k * d > std::min(cfg.m, n)) {
      throw std::invalid_argument("sweep: subspace_dim " + std::to_string(d) +
                                  " gives an infeasible true rank");
    }
  }
  for (double c : cfg.corruptions) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("sweep: corruption sizes must be finite and >= 0");
    }
  }
  if (cfg.methods.empty()) throw std::invalid_argument("sweep: need at least one method");
  for (const auto& name : cfg.methods) {
    if (!known_method(name)) throw std::invalid_argument("sweep: unknown method '" + name + "'");
    if (std::count(cfg.methods.begin(), cfg.methods.end(), name) != 1) {
      throw std::invalid_argument("sweep: duplicate method '" + name + "'");
    }
  }
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw std::invalid_argument("sweep: lambda must be finite and >= 0");
  }
  if (cfg.rank_override < 0 || cfg.rank_override > n) {
    throw std::invalid_argument("sweep: rank override must be in [0, n]");
  }
  if (cfg.max_iters < 1 || !(cfg.tol >= 0.0)) {
    throw std::invalid_argument("sweep: max_iters must be positive and tol >= 0");
  }
  if (cfg.threads < 0) throw std::invalid_argument("sweep: threads must be >= 0");
}

struct CellParams {
  Index dim;
  double corruption;
};

CellParams cell_params(const SweepConfig& cfg, int cell) {
  const int cc = static_cast<int>(cfg.corruptions.size());
  return {cfg.dims[static_cast<std::size_t>(cell / cc)],
          cfg.corruptions[static_cast<std::size_t>(cell % cc)]};
}

void normalize_columns(Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm > 0.0) a.col(j) /= norm;
  }
}

std::optional<TrialRecord> parse_trial_row(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (fields.size() != 12) return std::nullopt;

  const auto to_i = [](const std::string& s, auto& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
  };
  const auto to_d = [](const std::string& s, double& out) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
  };

  TrialRecord r;
  long long dim = 0, pp = 0, iters = 0;
  if (!to_i(fields[0], r.cell) || !to_i(fields[1], dim) || !to_d(fields[2], r.corruption_size) ||
      !to_i(fields[3], pp) || !to_i(fields[4], r.trial) || !to_i(fields[5], r.seed) ||
      !to_d(fields[7], r.snr_db) || !to_d(fields[8], r.score) || !to_d(fields[9], r.accuracy) ||
      !to_i(fields[10], iters) || !to_d(fields[11], r.wall_ms)) {
    return std::nullopt;
  }
  r.subspace_dim = static_cast<Index>(dim);
  r.p = static_cast<Index>(pp);
  r.iterations = static_cast<int>(iters);
  r.method = fields[6];
  if (!known_method(r.method)) return std::nullopt;
  return r;
}

}  // namespace

std::string trial_csv_header() { return kTrialHeader; }
std::string aggregate_csv_header() { return kAggregateHeader; }

std::string format_trial_row(const TrialRecord& r) {
  std::string out = std::to_string(r.cell);
  out += ',' + std::to_string(r.subspace_dim);
  out += ',' + format_double(r.corruption_size);
  out += ',' + std::to_string(r.p);
  out += ',' + std::to_string(r.trial);
  out += ',' + std::to_string(r.seed);
  out += ',' + r.method;
  out += ',' + format_double(r.snr_db);
  out += ',' + format_double(r.score);
  out += ',' + format_double(r.accuracy);
  out += ',' + std::to_string(r.iterations);
  out += ',' + format_double(r.wall_ms);
  return out;
}

nlohmann::json sweep_config_json(const SweepConfig& cfg) {
  nlohmann::json j;
  j["base_seed"] = cfg.base_seed;
  j["corruptions"] = cfg.corruptions;
  std::vector<long long> dims(cfg.dims.begin(), cfg.dims.end());
  j["dims"] = dims;
  j["k"] = cfg.k;
  j["lambda"] = cfg.lambda;
  j["m"] = cfg.m;
  j["max_iters"] = cfg.max_iters;
  j["methods"] = cfg.methods;
  j["n_per_class"] = cfg.n_per_class;
  j["normalize"] = cfg.normalize;
  j["p"] = cfg.p;
  j["rank_override"] = cfg.rank_override;
  j["record_timing"] = cfg.record_timing;
  j["tol"] = cfg.tol;
  j["trials"] = cfg.trials;
  return j;
}

std::vector<TrialRecord> run_sweep_unit(const SweepConfig& cfg, int cell, int trial) {
  validate(cfg);
  const int cells = static_cast<int>(cfg.dims.size() * cfg.corruptions.size());
  if (cell < 0 || cell >= cells || trial < 0 || trial >= cfg.trials) {
    throw std::invalid_argument("run_sweep_unit: cell or trial out of range");
  }
  const CellParams cp = cell_params(cfg, cell);
  const std::uint64_t trial_seed =
      derive_seed(cfg.base_seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial));
  const std::uint64_t instance_seed = derive_seed(trial_seed, 0, 1);
  const std::uint64_t sensing_seed = derive_seed(trial_seed, 0, 2);
  const std::uint64_t kmeans_seed = derive_seed(trial_seed, 0, 3);

  SynConfig sc;
  sc.ambient_dim = cfg.m;
  sc.n_per_class = cfg.n_per_class;
  sc.num_classes = cfg.k;
  sc.subspace_dim = cp.dim;
  sc.corruption_size = cp.corruption;
  sc.seed = instance_seed;
  const SynInstance inst = generate(sc);
  const Index n = inst.clean.cols();
  const Index r = cfg.rank_override > 0 ? cfg.rank_override : inst.true_rank;

  const SensingMatrix sensing = make_sensing(cfg.p, cfg.m, sensing_seed);
  Matrix m_mat = compress(sensing, inst.observed);
  if (cfg.normalize) normalize_columns(m_mat);

  const RowSpaceBasis v_true(truncated_svd(inst.clean, inst.true_rank).right);

  std::vector<TrialRecord> out;
  out.reserve(cfg.methods.size());
  for (const std::string& method : cfg.methods) {
    TrialRecord rec;
    rec.cell = cell;
    rec.subspace_dim = cp.dim;
    rec.corruption_size = cp.corruption;
    rec.p = cfg.p;
    rec.trial = trial;
    rec.seed = trial_seed;
    rec.method = method;

    const auto t0 = std::chrono::steady_clock::now();
    RowSpaceBasis est;
    int iterations = 1;
    if (method == "rsp") {
      RspParams params;
      params.rank = r;
      params.lambda = cfg.lambda;
      params.max_iters = cfg.max_iters;
      params.tol = cfg.tol;
      RspSolution sol = solve(m_mat, sensing, params);
      est = std::move(sol.row_space);
      iterations = sol.iterations;
    } else if (method == "sim") {
      // SIM can produce at most min(p, n) directions.
      est = sim_rowspace(m_mat, std::min(r, std::min(m_mat.rows(), n)));
    } else {
      est = pca_rowspace(m_mat, std::min(r, std::min(m_mat.rows(), n)));
    }
    const ClusterAssignment ca = kmeans(est.basis, static_cast<int>(cfg.k), kmeans_seed);
    rec.accuracy = accuracy(ca.labels, inst.labels);
    rec.snr_db = projector_snr(v_true, est);
    rec.score = score_of_snr(rec.snr_db);
    rec.iterations = iterations;
    if (cfg.record_timing) {
      rec.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

namespace {

nlohmann::json manifest_json(const SweepConfig& cfg, int cells, std::size_t units,
                             std::size_t completed) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["config"] = sweep_config_json(cfg);
  j["cells"] = cells;
  j["units"] = units;
  j["completed_units"] = completed;
  j["complete"] = completed == units;
  j["seed_scheme"] = "trial_seed = derive_seed(base_seed, cell, trial); "
                     "instance/sensing/kmeans = derive_seed(trial_seed, 0, {1,2,3})";
  return j;
}

// Loads the canonical prefix of completed units from an existing checkpoint.
// Returns one vector of records per completed unit. Anything after the first
// gap, partial group, or unparseable line is treated as an interrupted tail
// and discarded (it gets re-run); a config mismatch is a hard error.
std::vector<std::vector<TrialRecord>> load_checkpoint(const SweepConfig& cfg,
                                                      const std::filesystem::path& dir,
                                                      std::size_t units) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = read_json(manifest_path);
  } catch (const IoError& e) {
    throw CheckpointError(std::string("resume: ") + e.what());
  }
  if (!manifest.contains("config") || manifest["config"] != sweep_config_json(cfg)) {
    throw CheckpointError("resume: checkpoint config in " + manifest_path.string() +
                          " does not match the requested sweep");
  }

  std::vector<std::vector<TrialRecord>> done;
  const auto trials_path = dir / "trials.csv";
  if (!std::filesystem::exists(trials_path)) return done;

  std::ifstream in(trials_path);
  if (!in) throw CheckpointError("resume: cannot read " + trials_path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTrialHeader) {
    throw CheckpointError("resume: " + trials_path.string() + " has an unexpected header");
  }

  const std::size_t group = cfg.methods.size();
  std::vector<TrialRecord> current;
  while (done.size() < units && std::getline(in, line)) {
    std::optional<TrialRecord> rec = parse_trial_row(line);
    if (!rec) break;
    const std::size_t unit = done.size();
    const int cell = static_cast<int>(unit) / cfg.trials;
    const int trial = static_cast<int>(unit) % cfg.trials;
    const CellParams cp = cell_params(cfg, cell);
    const bool in_place = rec->cell == cell && rec->trial == trial &&
                          rec->subspace_dim == cp.dim && rec->p == cfg.p &&
                          rec->method == cfg.methods[current.size()];
    if (!in_place) break;
    current.push_back(std::move(*rec));
    if (current.size() == group) {
      done.push_back(std::move(current));
      current.clear();
    }
  }
  return done;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, const std::filesystem::path& out_dir, bool resume,
                      std::ostream* progress) {
  validate(cfg);
  const int cells = static_cast<int>(cfg.dims.size() * cfg.corruptions.size());
  const std::size_t units = static_cast<std::size_t>(cells) * static_cast<std::size_t>(cfg.trials);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::vector<TrialRecord>> by_unit(units);
  std::size_t first_pending = 0;
  if (resume) {
    auto done = load_checkpoint(cfg, out_dir, units);
    first_pending = done.size();
    for (std::size_t u = 0; u < done.size(); ++u) by_unit[u] = std::move(done[u]);
  }

  // Rewrite the kept prefix so the file is clean regardless of how the
  // previous run stopped, then append from there.
  {
    std::string text = std::string(kTrialHeader) + "\n";
    for (std::size_t u = 0; u < first_pending; ++u) {
      for (const TrialRecord& r : by_unit[u]) text += format_trial_row(r) + "\n";
    }
    write_text_atomic(out_dir / "trials.csv", text);
  }
  write_json_atomic(out_dir / "manifest.json", manifest_json(cfg, cells, units, first_pending));

  std::ofstream out(out_dir / "trials.csv", std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot append to " + (out_dir / "trials.csv").string());

  int thread_count = cfg.threads;
  if (thread_count == 0) {
    thread_count = static_cast<int>(std::thread::hardware_concurrency());
    if (thread_count < 1) thread_count = 1;
  }
  thread_count = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(thread_count), std::max<std::size_t>(units - first_pending, 1)));

  std::mutex mu;
  std::map<std::size_t, std::vector<TrialRecord>> landing;
  std::size_t flush_at = first_pending;
  std::atomic<std::size_t> next{first_pending};
  std::exception_ptr failure;
  const std::size_t progress_step = std::max<std::size_t>(units / 20, 1);

  const auto flush_locked = [&]() {
    bool advanced = false;
    for (auto it = landing.find(flush_at); it != landing.end(); it = landing.find(flush_at)) {
      for (const TrialRecord& r : it->second) out << format_trial_row(r) << '\n';
      by_unit[flush_at] = std::move(it->second);
      landing.erase(it);
      ++flush_at;
      advanced = true;
    }
    if (advanced) {
      out.flush();
      write_json_atomic(out_dir / "manifest.json", manifest_json(cfg, cells, units, flush_at));
      if (progress && (flush_at == units || flush_at % progress_step == 0)) {
        (*progress) << "sweep: " << flush_at << "/" << units << " units\n";
        progress->flush();
      }
    }
  };

  const auto worker = [&]() {
    while (true) {
      const std::size_t u = next.fetch_add(1);
      if (u >= units) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        std::vector<TrialRecord> recs =
            run_sweep_unit(cfg, static_cast<int>(u) / cfg.trials, static_cast<int>(u) % cfg.trials);
        std::lock_guard<std::mutex> lock(mu);
        landing[u] = std::move(recs);
        flush_locked();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.close();

  SweepResult result;
  result.records.reserve(units * cfg.methods.size());
  for (auto& unit_records : by_unit) {
    for (TrialRecord& r : unit_records) result.records.push_back(std::move(r));
  }

  // Aggregates: cell-major, methods in config order, plain means.
  std::string agg_csv = std::string(kAggregateHeader) + "\n";
  nlohmann::json agg_json = nlohmann::json::array();
  for (int cell = 0; cell < cells; ++cell) {
    const CellParams cp = cell_params(cfg, cell);
    for (const std::string& method : cfg.methods) {
      CellAggregate agg;
      agg.cell = cell;
      agg.subspace_dim = cp.dim;
      agg.corruption_size = cp.corruption;
      agg.p = cfg.p;
      agg.method = method;
      for (const TrialRecord& r : result.records) {
        if (r.cell != cell || r.method != method) continue;
        ++agg.trials;
        agg.mean_snr_db += r.snr_db;
        agg.mean_score += r.score;
        agg.mean_accuracy += r.accuracy;
        agg.mean_wall_ms += r.wall_ms;
      }
      if (agg.trials > 0) {
        agg.mean_snr_db /= agg.trials;
        agg.mean_score /= agg.trials;
        agg.mean_accuracy /= agg.trials;
        agg.mean_wall_ms /= agg.trials;
      }
      agg_csv += std::to_string(agg.cell) + ',' + std::to_string(agg.subspace_dim) + ',' +
                 format_double(agg.corruption_size) + ',' + std::to_string(agg.p) + ',' +
                 agg.method + ',' + std::to_string(agg.trials) + ',' +
                 format_double(agg.mean_snr_db) + ',' + format_double(agg.mean_score) + ',' +
                 format_double(agg.mean_accuracy) + ',' + format_double(agg.mean_wall_ms) + '\n';
      nlohmann::json aj;
      aj["cell"] = agg.cell;
      aj["subspace_dim"] = agg.subspace_dim;
      aj["corruption_size"] = agg.corruption_size;
      aj["p"] = agg.p;
      aj["method"] = agg.method;
      aj["trials"] = agg.trials;
      aj["mean_snr_db"] = agg.mean_snr_db;
      aj["mean_score"] = agg.mean_score;
      aj["mean_accuracy"] = agg.mean_accuracy;
      aj["mean_wall_ms"] = agg.mean_wall_ms;
      agg_json.push_back(aj);
      result.aggregates.push_back(std::move(agg));
    }
  }
  write_text_atomic(out_dir / "aggregate.csv", agg_csv);
  write_json_atomic(out_dir / "aggregate.json", agg_json);
  write_json_atomic(out_dir / "manifest.json", manifest_json(cfg, cells, units, units));
  return result;
}

}  // namespace rsp
