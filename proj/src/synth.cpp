#include "rsp/synth.hpp"

#include "rsp/rng.hpp"

#include <Eigen/QR>

#include <numeric>

namespace rsp {

namespace {

void validate(const SynConfig& cfg) {
  if (cfg.ambient_dim < 1) throw std::invalid_argument("generate: ambient_dim must be positive");
  if (cfg.n_per_class < 1) throw std::invalid_argument("generate: n_per_class must be positive");
  if (cfg.num_classes < 1) throw std::invalid_argument("generate: num_classes must be positive");
  if (cfg.subspace_dim < 1 || cfg.subspace_dim > cfg.ambient_dim) {
    throw std::invalid_argument("generate: subspace_dim must be in [1, ambient_dim]");
  }
  const Index n = cfg.n_per_class * cfg.num_classes;
  if (cfg.num_classes * cfg.subspace_dim > std::min(cfg.ambient_dim, n)) {
    throw std::invalid_argument(
        "generate: true rank k*subspace_dim exceeds min(ambient_dim, n)");
  }
  if (!(cfg.corruption_size >= 0.0) || !std::isfinite(cfg.corruption_size)) {
    throw std::invalid_argument("generate: corruption_size must be finite and >= 0");
  }
}

}  // namespace

SynInstance generate(const SynConfig& cfg) {
  validate(cfg);
  const Index m = cfg.ambient_dim;
  const Index n = cfg.n_per_class * cfg.num_classes;
  const Index d = cfg.subspace_dim;

  const auto count64 = static_cast<std::uint64_t>(std::llround(cfg.corruption_size * static_cast<double>(n)));
  const auto cells = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
  if (count64 > cells) {
    throw std::invalid_argument("generate: corruption_size asks for more entries than the matrix has");
  }

  Rng rng(cfg.seed);
  SynInstance out;
  out.config = cfg;
  out.true_rank = cfg.num_classes * d;
  out.clean.resize(m, n);
  out.labels.resize(static_cast<std::size_t>(n));

  // Draw order is part of the reproducibility contract: for each class, the
  // basis Gaussians (row by row), then the coefficient Gaussians; after all
  // classes, one (position, sign) pair per corrupted entry.
  for (Index c = 0; c < cfg.num_classes; ++c) {
    const Matrix raw = gaussian_matrix(m, d, rng);
    Eigen::HouseholderQR<Matrix> qr(raw);
    const Matrix basis = qr.householderQ() * Matrix::Identity(m, d);
    const Matrix coeffs = gaussian_matrix(d, cfg.n_per_class, rng);
    out.clean.middleCols(c * cfg.n_per_class, cfg.n_per_class) = basis * coeffs;
    for (Index j = 0; j < cfg.n_per_class; ++j) {
      out.labels[static_cast<std::size_t>(c * cfg.n_per_class + j)] = static_cast<int>(c);
    }
  }

  const double peak = out.clean.cwiseAbs().maxCoeff();
  if (peak > 0.0) out.clean /= peak;

  out.corruption = Matrix::Zero(m, n);
  // Partial Fisher-Yates over the flattened (row-major) index grid picks
  // `count` distinct cells uniformly.
  std::vector<std::uint64_t> grid(cells);
  std::iota(grid.begin(), grid.end(), std::uint64_t{0});
  for (std::uint64_t t = 0; t < count64; ++t) {
    const std::uint64_t j = t + rng.below(cells - t);
    std::swap(grid[t], grid[j]);
    const Index row = static_cast<Index>(grid[t] / static_cast<std::uint64_t>(n));
    const Index col = static_cast<Index>(grid[t] % static_cast<std::uint64_t>(n));
    out.corruption(row, col) = (rng.next_u64() & 1) ? 1.0 : -1.0;
  }
  out.corruption_count = static_cast<Index>(count64);

  out.observed = out.clean + out.corruption;
  return out;
}

}  // namespace rsp
