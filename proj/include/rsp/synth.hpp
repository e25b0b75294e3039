#pragma once

#include "rsp/matrix.hpp"

#include <cstdint>
#include <vector>

namespace rsp {

/// Parameters for the synthetic union-of-subspaces generator.
struct SynConfig {
  Index ambient_dim = 200;    // m, rows of the data matrix
  Index n_per_class = 100;    // columns drawn from each subspace
  Index num_classes = 2;      // k
  Index subspace_dim = 2;     // d, dimension of each subspace
  double corruption_size = 0.0;  // corrupted entries = round(corruption_size * n)
  std::uint64_t seed = 0;
};

/// A generated instance: low-rank clean data, sparse +-1 corruption, and
/// their sum, plus the class label of every column.
struct SynInstance {
  Matrix clean;       // m x n, sup-norm 1 (unless identically zero)
  Matrix corruption;  // m x n, entries in {-1, 0, +1}
  Matrix observed;    // clean + corruption
  std::vector<int> labels;  // n, values 0..k-1 in class-block order
  Index true_rank = 0;          // k * d
  Index corruption_count = 0;   // nonzeros of `corruption`
  SynConfig config;
};

/// Draws one instance. Class i contributes a block U_i * C_i where U_i is a
/// random m x d orthonormal basis (QR of a Gaussian) and C_i is d x
/// n_per_class standard Gaussian; the concatenated matrix is scaled to unit
/// sup-norm. Corruption flips round(corruption_size * n) distinct entries by
/// +-1, positions sampled without replacement over the whole matrix.
SynInstance generate(const SynConfig& cfg);

}  // namespace rsp
