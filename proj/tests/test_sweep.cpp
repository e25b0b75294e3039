#include "rsp/sweep.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace rsp;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* tag) {
    path = std::filesystem::temp_directory_path() /
           (std::string("rsp_sweep_") + tag + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

// Small enough to run in milliseconds, rich enough to exercise every code
// path: 2 x 2 grid, 3 trials, all three methods.
SweepConfig tiny_config() {
  SweepConfig cfg;
  cfg.dims = {1, 2};
  cfg.corruptions = {0.5, 2.0};
  cfg.p = 8;
  cfg.m = 24;
  cfg.n_per_class = 8;
  cfg.k = 2;
  cfg.trials = 3;
  cfg.base_seed = 77;
  cfg.lambda = 1.0 / 64.0;
  cfg.max_iters = 50;
  cfg.tol = 1e-6;
  cfg.record_timing = false;
  cfg.threads = 1;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("headers and row formatting are stable") {
  CHECK(trial_csv_header() ==
        "cell,subspace_dim,corruption_size,p,trial,seed,method,snr_db,score,accuracy,iterations,"
        "wall_ms");
  CHECK(aggregate_csv_header() ==
        "cell,subspace_dim,corruption_size,p,method,trials,mean_snr_db,mean_score,mean_accuracy,"
        "mean_wall_ms");

  TrialRecord r;
  r.cell = 3;
  r.subspace_dim = 2;
  r.corruption_size = 0.5;
  r.p = 8;
  r.trial = 1;
  r.seed = 123456789;
  r.method = "rsp";
  r.snr_db = 31.25;
  r.score = 1.0;
  r.accuracy = 0.875;
  r.iterations = 17;
  r.wall_ms = 0.0;
  CHECK(format_trial_row(r) == "3,2,0.5,8,1,123456789,rsp,31.25,1,0.875,17,0");
}

TEST_CASE("config json excludes the worker count") {
  SweepConfig a = tiny_config();
  SweepConfig b = tiny_config();
  b.threads = 7;
  CHECK(sweep_config_json(a) == sweep_config_json(b));
  CHECK(!sweep_config_json(a).contains("threads"));
}

TEST_CASE("a full sweep lands in canonical order with full counts") {
  const SweepConfig cfg = tiny_config();
  TempDir dir("full");
  const SweepResult res = run_sweep(cfg, dir.path);

  const int cells = 4;
  const std::size_t units = 12;
  REQUIRE(res.records.size() == units * 3);
  REQUIRE(res.aggregates.size() == cells * 3);

  const char* methods[3] = {"rsp", "sim", "pca"};
  for (std::size_t idx = 0; idx < res.records.size(); ++idx) {
    const TrialRecord& r = res.records[idx];
    const std::size_t unit = idx / 3;
    CHECK(r.cell == static_cast<int>(unit) / cfg.trials);
    CHECK(r.trial == static_cast<int>(unit) % cfg.trials);
    CHECK(r.method == methods[idx % 3]);
    // Cell index is row-major over (dim, corruption).
    CHECK(r.subspace_dim == cfg.dims[static_cast<std::size_t>(r.cell / 2)]);
    CHECK(r.corruption_size == cfg.corruptions[static_cast<std::size_t>(r.cell % 2)]);
    CHECK(r.p == cfg.p);
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    CHECK(std::isfinite(r.snr_db));
    CHECK(r.wall_ms == 0.0);
    if (r.method == "rsp") {
      CHECK(r.iterations >= 1);
      CHECK(r.iterations <= cfg.max_iters);
    } else {
      CHECK(r.iterations == 1);
    }
  }

  // The three methods of one trial share the same per-trial seed; different
  // trials never do.
  for (std::size_t unit = 0; unit < units; ++unit) {
    CHECK(res.records[unit * 3].seed == res.records[unit * 3 + 1].seed);
    CHECK(res.records[unit * 3].seed == res.records[unit * 3 + 2].seed);
    if (unit > 0) CHECK(res.records[unit * 3].seed != res.records[(unit - 1) * 3].seed);
  }

  // trials.csv is exactly the header plus one formatted row per record.
  const std::vector<std::string> got = lines_of(slurp(dir.path / "trials.csv"));
  REQUIRE(got.size() == 1 + res.records.size());
  CHECK(got[0] == trial_csv_header());
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    CHECK(got[i + 1] == format_trial_row(res.records[i]));
  }

  // Aggregates are plain means of the matching records.
  for (const CellAggregate& agg : res.aggregates) {
    CHECK(agg.trials == cfg.trials);
    double snr = 0.0, score = 0.0, acc = 0.0;
    for (const TrialRecord& r : res.records) {
      if (r.cell != agg.cell || r.method != agg.method) continue;
      snr += r.snr_db;
      score += r.score;
      acc += r.accuracy;
    }
    CHECK(agg.mean_snr_db == doctest::Approx(snr / cfg.trials).epsilon(1e-15));
    CHECK(agg.mean_score == doctest::Approx(score / cfg.trials).epsilon(1e-15));
    CHECK(agg.mean_accuracy == doctest::Approx(acc / cfg.trials).epsilon(1e-15));
    CHECK(agg.mean_wall_ms == 0.0);
  }

  // Manifest closes out complete.
  const nlohmann::json manifest = read_json(dir.path / "manifest.json");
  CHECK(manifest["complete"] == true);
  CHECK(manifest["units"] == 12);
  CHECK(manifest["completed_units"] == 12);
  CHECK(manifest["cells"] == 4);
  CHECK(manifest["config"] == sweep_config_json(cfg));
}

TEST_CASE("sweeps are byte-identical across directories and thread counts") {
  const SweepConfig cfg = tiny_config();
  TempDir a("det_a"), b("det_b"), c("det_c");
  run_sweep(cfg, a.path);
  run_sweep(cfg, b.path);
  SweepConfig threaded = cfg;
  threaded.threads = 3;
  run_sweep(threaded, c.path);

  for (const char* name : {"trials.csv", "aggregate.csv", "aggregate.json"}) {
    CHECK(slurp(a.path / name) == slurp(b.path / name));
    CHECK(slurp(a.path / name) == slurp(c.path / name));
  }
  // Manifests differ only in the config they embed, and threads is excluded,
  // so they match too.
  CHECK(slurp(a.path / "manifest.json") == slurp(c.path / "manifest.json"));
}

TEST_CASE("run_sweep_unit composes into the full sweep") {
  const SweepConfig cfg = tiny_config();
  TempDir dir("unit");
  const SweepResult res = run_sweep(cfg, dir.path);
  for (int cell : {0, 3}) {
    for (int trial : {0, 2}) {
      const std::vector<TrialRecord> unit = run_sweep_unit(cfg, cell, trial);
      REQUIRE(unit.size() == 3);
      const std::size_t base = (static_cast<std::size_t>(cell) * 3 + static_cast<std::size_t>(trial)) * 3;
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(format_trial_row(unit[i]) == format_trial_row(res.records[base + i]));
      }
    }
  }
  CHECK_THROWS_AS(run_sweep_unit(cfg, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep_unit(cfg, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(run_sweep_unit(cfg, -1, 0), std::invalid_argument);
}

TEST_CASE("resume replays a truncated checkpoint to the identical result") {
  const SweepConfig cfg = tiny_config();
  TempDir full("res_full"), cut("res_cut");
  run_sweep(cfg, full.path);
  const std::string full_trials = slurp(full.path / "trials.csv");
  const std::vector<std::string> all = lines_of(full_trials);

  // Keep the header, two complete units (6 rows) and one stray row of the
  // third unit, as if the process died mid-write.
  std::string partial;
  for (std::size_t i = 0; i < 8; ++i) partial += all[i] + "\n";
  {
    std::ofstream out(cut.path / "trials.csv", std::ios::binary);
    out << partial;
  }
  std::filesystem::copy_file(full.path / "manifest.json", cut.path / "manifest.json",
                             std::filesystem::copy_options::overwrite_existing);

  const SweepResult res = run_sweep(cfg, cut.path, /*resume=*/true);
  CHECK(res.records.size() == 36);
  for (const char* name : {"trials.csv", "aggregate.csv", "aggregate.json", "manifest.json"}) {
    CHECK(slurp(cut.path / name) == slurp(full.path / name));
  }
}

TEST_CASE("resume tolerates a corrupt line by re-running from it") {
  const SweepConfig cfg = tiny_config();
  TempDir full("cor_full"), cor("cor_cut");
  run_sweep(cfg, full.path);
  std::vector<std::string> all = lines_of(slurp(full.path / "trials.csv"));
  all[10] = "garbage,line";
  std::string text;
  for (const std::string& l : all) text += l + "\n";
  {
    std::ofstream out(cor.path / "trials.csv", std::ios::binary);
    out << text;
  }
  std::filesystem::copy_file(full.path / "manifest.json", cor.path / "manifest.json",
                             std::filesystem::copy_options::overwrite_existing);

  run_sweep(cfg, cor.path, /*resume=*/true);
  CHECK(slurp(cor.path / "trials.csv") == slurp(full.path / "trials.csv"));
}

TEST_CASE("resume on a complete checkpoint leaves it untouched") {
  const SweepConfig cfg = tiny_config();
  TempDir dir("res_done");
  run_sweep(cfg, dir.path);
  const std::string before = slurp(dir.path / "trials.csv");
  const SweepResult res = run_sweep(cfg, dir.path, /*resume=*/true);
  CHECK(res.records.size() == 36);
  CHECK(slurp(dir.path / "trials.csv") == before);
}

TEST_CASE("resume rejects a mismatched or absent checkpoint") {
  const SweepConfig cfg = tiny_config();
  TempDir dir("res_bad");
  run_sweep(cfg, dir.path);

  SweepConfig other = cfg;
  other.lambda = 1.0 / 32.0;
  CHECK_THROWS_AS(run_sweep(other, dir.path, /*resume=*/true), CheckpointError);

  // threads is not part of the stored config, so changing it resumes fine.
  SweepConfig rethreaded = cfg;
  rethreaded.threads = 2;
  CHECK_NOTHROW(run_sweep(rethreaded, dir.path, /*resume=*/true));

  TempDir fresh("res_fresh");
  CHECK_THROWS_AS(run_sweep(cfg, fresh.path, /*resume=*/true), CheckpointError);
}

TEST_CASE("sweep configs are validated") {
  SweepConfig cfg = tiny_config();

  SweepConfig bad = cfg;
  bad.dims.clear();
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.p = 25;  // > m
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.methods = {"rsp", "magic"};
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.methods = {"rsp", "rsp"};
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.dims = {20};  // k * 20 = 40 > min(m, n) = 16
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.methods.clear();
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);

  bad = cfg;
  bad.rank_override = 17;  // > n = 16
  CHECK_THROWS_AS(run_sweep_unit(bad, 0, 0), std::invalid_argument);
}

TEST_CASE("method subsets and rank overrides flow through") {
  SweepConfig cfg = tiny_config();
  cfg.dims = {1};
  cfg.corruptions = {0.5};
  cfg.trials = 2;
  cfg.methods = {"sim"};
  cfg.rank_override = 3;
  TempDir dir("subset");
  const SweepResult res = run_sweep(cfg, dir.path);
  REQUIRE(res.records.size() == 2);
  for (const TrialRecord& r : res.records) {
    CHECK(r.method == "sim");
    CHECK(r.iterations == 1);
  }
  REQUIRE(res.aggregates.size() == 1);
  CHECK(res.aggregates[0].method == "sim");
  CHECK(res.aggregates[0].trials == 2);
}
