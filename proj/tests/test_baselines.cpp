#include "rsp/baselines.hpp"

#include "rsp/metrics.hpp"
#include "rsp/sensing.hpp"
#include "rsp/synth.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace rsp;
using namespace rsp::testing;

namespace {

SynInstance corner(double corruption, std::uint64_t seed) {
  SynConfig cfg;
  cfg.ambient_dim = 200;
  cfg.n_per_class = 100;
  cfg.num_classes = 2;
  cfg.subspace_dim = 1;
  cfg.corruption_size = corruption;
  cfg.seed = seed;
  return generate(cfg);
}

}  // namespace

TEST_CASE("sim_rowspace equals the truncated right factor of M") {
  const Matrix m = random_matrix(12, 30, 5);
  const RowSpaceBasis got = sim_rowspace(m, 4);
  const FullSvd oracle = jacobi_svd(m);
  CHECK(projector_distance(got.basis, oracle.right.leftCols(4)) < 1e-9);
  CHECK(got.points() == 30);
  CHECK(got.rank() == 4);
  CHECK_THROWS_AS(sim_rowspace(m, 13), std::invalid_argument);
  CHECK_THROWS_AS(sim_rowspace(m, 0), std::invalid_argument);
}

TEST_CASE("pca_rowspace matches sim_rowspace: both take the SVD of M itself") {
  const Matrix m = random_matrix(12, 30, 6);
  const RowSpaceBasis pca = pca_rowspace(m, 3);
  CHECK(pca.basis == sim_rowspace(m, 3).basis);
  const FullSvd oracle = jacobi_svd(m);
  CHECK(projector_distance(pca.basis, oracle.right.leftCols(3)) < 1e-9);
  CHECK_THROWS_AS(pca_rowspace(m, 13), std::invalid_argument);
  CHECK_THROWS_AS(pca_rowspace(m, 0), std::invalid_argument);
}

TEST_CASE("on clean data SIM nails the row space") {
  const SynInstance inst = corner(0.0, 31);
  const SensingMatrix sense = make_sensing(50, 200, 32);
  const Matrix m = compress(sense, inst.observed);
  const RowSpaceBasis v_true(jacobi_svd(inst.clean).right.leftCols(inst.true_rank));

  const RowSpaceBasis sim = sim_rowspace(m, inst.true_rank);
  CHECK(projector_snr(v_true, sim) >= 30.0);

  const RowSpaceBasis pca = pca_rowspace(m, inst.true_rank);
  CHECK(projector_snr(v_true, pca) >= 30.0);
}

TEST_CASE("heavy corruption wrecks both baselines") {
  const SynInstance inst = corner(4.0, 41);
  const SensingMatrix sense = make_sensing(50, 200, 42);
  const Matrix m = compress(sense, inst.observed);
  const RowSpaceBasis v_true(jacobi_svd(inst.clean).right.leftCols(inst.true_rank));

  CHECK(projector_snr(v_true, sim_rowspace(m, inst.true_rank)) < 15.0);
  CHECK(projector_snr(v_true, pca_rowspace(m, inst.true_rank)) < 15.0);
}
