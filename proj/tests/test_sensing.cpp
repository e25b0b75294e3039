#include "rsp/sensing.hpp"

#include "rsp/svd.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

using namespace rsp;
using namespace rsp::testing;

TEST_CASE("columns are unit vectors") {
  const SensingMatrix r = make_sensing(7, 40, 123);
  REQUIRE(r.p() == 7);
  REQUIRE(r.m() == 40);
  CHECK(r.seed == 123);
  for (Index j = 0; j < r.m(); ++j) {
    CHECK(std::abs(r.matrix.col(j).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("1x1 sensing is a sign") {
  const SensingMatrix r = make_sensing(1, 1, 9);
  CHECK(std::abs(std::abs(r.matrix(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("same seed gives bitwise-identical sensing matrices") {
  const SensingMatrix a = make_sensing(10, 30, 77);
  const SensingMatrix b = make_sensing(10, 30, 77);
  CHECK(a.matrix == b.matrix);
  const SensingMatrix c = make_sensing(10, 30, 78);
  CHECK(a.matrix != c.matrix);
}

TEST_CASE("draw order is column-major") {
  // The first column must consume exactly the first p normal draws.
  const Index p = 3, m = 5;
  const SensingMatrix r = make_sensing(p, m, 2024);
  Rng rng(2024);
  Vector first(p);
  for (Index i = 0; i < p; ++i) first[i] = rng.normal();
  const Vector want = first / first.norm();
  CHECK((r.matrix.col(0) - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("make_sensing rejects bad shapes") {
  CHECK_THROWS_AS(make_sensing(0, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_sensing(5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_sensing(6, 5, 1), std::invalid_argument);
  CHECK_NOTHROW(make_sensing(5, 5, 1));
}

TEST_CASE("sensing_from_matrix accepts unit columns and rejects others") {
  const SensingMatrix src = make_sensing(4, 9, 3);
  const SensingMatrix wrapped = sensing_from_matrix(src.matrix, 55);
  CHECK(wrapped.matrix == src.matrix);
  CHECK(wrapped.seed == 55);

  CHECK_NOTHROW(sensing_from_matrix(Matrix::Identity(6, 6), 0));
  CHECK_THROWS_AS(sensing_from_matrix(Matrix::Ones(3, 3), 0), std::invalid_argument);
  CHECK_THROWS_AS(sensing_from_matrix(Matrix(), 0), std::invalid_argument);
}

TEST_CASE("compress matches the product oracle") {
  const SensingMatrix r = make_sensing(6, 20, 11);
  const Matrix x = random_matrix(20, 15, 12);
  const Matrix got = compress(r, x);
  REQUIRE(got.rows() == 6);
  REQUIRE(got.cols() == 15);
  CHECK((got - matmul_oracle(r.matrix, x)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(compress(r, Matrix::Zero(20, 4)) == Matrix::Zero(6, 4));
  CHECK_THROWS_AS(compress(r, Matrix::Zero(19, 4)), ShapeError);
}

TEST_CASE("identity sensing leaves the data untouched") {
  const SensingMatrix eye = sensing_from_matrix(Matrix::Identity(8, 8), 0);
  const Matrix x = random_matrix(8, 5, 21);
  CHECK(compress(eye, x) == x);
}

TEST_CASE("random compression preserves the rank of a low-rank matrix") {
  // Rank-r0 data in an m-dimensional ambient space keeps rank r0 after
  // projection to p >= r0 dimensions (with probability one).
  const Index m = 60, n = 50, r0 = 4, p = 10;
  const Matrix x = random_matrix(m, r0, 31) * random_matrix(r0, n, 32);
  const SensingMatrix r = make_sensing(p, m, 33);
  const Matrix mx = compress(r, x);

  const FullSvd s = jacobi_svd(mx);
  CHECK(s.values[r0 - 1] > 1e-8 * s.values[0]);
  CHECK(s.values[r0] < 1e-8 * s.values[0]);
}
