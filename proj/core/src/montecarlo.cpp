#include "superres/montecarlo.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "superres/error.hpp"
#include "superres/parallel.hpp"
#include "superres/spade.hpp"

namespace superres {

namespace {

__extension__ typedef __int128 Int128;

class ChunkSampler {
 public:
  ChunkSampler(const McConfig& cfg, std::uint64_t chunk)
      : q_(cfg.mode_count), dark_(cfg.params.dark), counts_(cfg.mode_count) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    rng_.seed(seq);
    const Eigen::VectorXd f = poisson_weights(cfg.params.s, cfg.params.sigma, q_);
    amp_.resize(q_);
    for (int q = 0; q < q_; ++q) amp_[q] = std::sqrt(f(q));
    src_sd_ = std::sqrt(cfg.params.signal() / 2.0);
    noise_sd_ = std::sqrt(cfg.params.n_n / 2.0);
  }

  std::span<const std::int64_t> next() {
    const std::complex<double> a1 = gauss(src_sd_);
    const std::complex<double> a2 = gauss(src_sd_);
    for (int q = 0; q < q_; ++q) {
      const std::complex<double> r = (q % 2 == 0) ? a1 + a2 : a1 - a2;
      const std::complex<double> b = r * amp_[q] + gauss(noise_sd_);
      const double mean = std::norm(b) + dark_;
      counts_[q] = mean > 0.0 ? std::poisson_distribution<std::int64_t>(mean)(rng_) : 0;
    }
    return counts_;
  }

 private:
  std::complex<double> gauss(double sd) {
    if (sd == 0.0) return {};
    const double re = normal_(rng_);
    const double im = normal_(rng_);
    return {sd * re, sd * im};
  }

  int q_;
  double dark_;
  double src_sd_ = 0.0;
  double noise_sd_ = 0.0;
  std::vector<double> amp_;
  std::vector<std::int64_t> counts_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

std::uint64_t chunk_count(const McConfig& cfg) { return (cfg.samples + kMcChunkSize - 1) / kMcChunkSize; }

std::uint64_t chunk_length(const McConfig& cfg, std::uint64_t c) {
  const std::uint64_t begin = c * kMcChunkSize;
  return std::min(kMcChunkSize, cfg.samples - begin);
}

// Exact sums of x_i, x_i x_j, x_i^2 x_j and x_i^2 x_j^2.
struct RawSums {
  explicit RawSums(int q) : q(q), s1(q, 0), s2(q * q, 0), s3(q * q, 0), s4(q * q, 0) {}

  void add(std::span<const std::int64_t> x) {
    for (int i = 0; i < q; ++i) {
      const Int128 xi = x[i];
      s1[i] += xi;
      for (int j = 0; j < q; ++j) {
        const Int128 xij = xi * x[j];
        s2[i * q + j] += xij;
        s3[i * q + j] += xi * xij;
        s4[i * q + j] += xij * xij;
      }
    }
  }

  void merge(const RawSums& o) {
    for (int i = 0; i < q; ++i) s1[i] += o.s1[i];
    for (int k = 0; k < q * q; ++k) {
      s2[k] += o.s2[k];
      s3[k] += o.s3[k];
      s4[k] += o.s4[k];
    }
  }

  int q;
  std::vector<Int128> s1, s2, s3, s4;
};

}  // namespace

void McConfig::validate() const {
  params.validate();
  if (samples < 1) throw ValidationError("Monte-Carlo samples must be >= 1");
  if (mode_count < 1) throw ValidationError("mode_count must be >= 1");
}

void sample_counts(const McConfig& cfg, const std::function<void(std::span<const std::int64_t>)>& sink) {
  cfg.validate();
  for (std::uint64_t c = 0; c < chunk_count(cfg); ++c) {
    ChunkSampler sampler(cfg, c);
    const std::uint64_t len = chunk_length(cfg, c);
    for (std::uint64_t k = 0; k < len; ++k) sink(sampler.next());
  }
}

McEstimate estimate_moments(const McConfig& cfg, unsigned workers) {
  cfg.validate();
  if (cfg.samples < 1000) throw ValidationError("estimate_moments needs at least 1000 samples");
  const int q = cfg.mode_count;
  const std::uint64_t chunks = chunk_count(cfg);

  std::vector<RawSums> partial(chunks, RawSums(q));
  parallel_for(
      chunks,
      [&](std::size_t c) {
        ChunkSampler sampler(cfg, c);
        const std::uint64_t len = chunk_length(cfg, c);
        for (std::uint64_t k = 0; k < len; ++k) partial[c].add(sampler.next());
      },
      workers);
  RawSums total(q);
  for (const auto& p : partial) total.merge(p);

  using LD = long double;
  const LD n = static_cast<LD>(cfg.samples);
  auto mean_of = [&](const std::vector<Int128>& s, int k) { return static_cast<LD>(s[k]) / n; };

  McEstimate est;
  est.samples = cfg.samples;
  est.mu_hat.resize(q);
  est.mu_se.resize(q);
  est.c_hat.resize(q, q);
  est.c_se.resize(q, q);

  std::vector<LD> m(q);
  for (int i = 0; i < q; ++i) m[i] = mean_of(total.s1, i);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const LD eab = mean_of(total.s2, i * q + j);
      const LD cov_pop = eab - m[i] * m[j];
      est.c_hat(i, j) = static_cast<double>(cov_pop * n / (n - 1));
      const LD ea2 = mean_of(total.s2, i * q + i);
      const LD eb2 = mean_of(total.s2, j * q + j);
      const LD ea2b = mean_of(total.s3, i * q + j);
      const LD eab2 = mean_of(total.s3, j * q + i);
      const LD ea2b2 = mean_of(total.s4, i * q + j);
      const LD ma = m[i];
      const LD mb = m[j];
      const LD m4 = ea2b2 - 2 * mb * ea2b - 2 * ma * eab2 + mb * mb * ea2 + ma * ma * eb2 + 4 * ma * mb * eab -
                    3 * ma * ma * mb * mb;
      const LD var = m4 - cov_pop * cov_pop;
      est.c_se(i, j) = static_cast<double>(std::sqrt(std::max<LD>(var, 0) / n));
    }
  }
  for (int i = 0; i < q; ++i) {
    est.mu_hat(i) = static_cast<double>(m[i]);
    est.mu_se(i) = std::sqrt(std::max(est.c_hat(i, i), 0.0) / static_cast<double>(n));
  }
  return est;
}

}  // namespace superres
