#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include <Eigen/Dense>

#include "superres/scene.hpp"

namespace superres {

struct McConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 42;
  SceneParams params;
  int mode_count = 8;

  void validate() const;
};

struct McEstimate {
  std::uint64_t samples = 0;
  Eigen::VectorXd mu_hat;
  Eigen::MatrixXd c_hat;  ///< unbiased sample covariance
  Eigen::VectorXd mu_se;
  Eigen::MatrixXd c_se;
};

/// Samples per substream. Sample k always comes from substream k / kChunkSize,
/// so the stream does not depend on the number of workers.
inline constexpr std::uint64_t kMcChunkSize = 4096;

/// Emits the count vectors N_0..N_{Q-1} of every sample in order.
///
/// Each substream is a std::mt19937_64 seeded with seed_seq{seed, chunk} (each
/// split into 32-bit halves) and drives std::normal_distribution and
/// std::poisson_distribution, so streams are reproducible for a given
/// standard library.
void sample_counts(const McConfig& cfg, const std::function<void(std::span<const std::int64_t>)>& sink);

/// Single-pass mean and covariance with standard errors. Raw moment sums are
/// accumulated exactly in 128-bit integers, so the estimate is bit-identical
/// for any worker count. Requires samples >= 1000.
McEstimate estimate_moments(const McConfig& cfg, unsigned workers = 0);

}  // namespace superres
