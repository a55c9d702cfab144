#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace superres {

/// Sampling grid for numeric PSFs. `halfwidth <= 0` means 12 sigma.
struct Quadrature {
  int node_count = 2001;
  double halfwidth = 0.0;
  double abs_tolerance = 1e-12;
};

enum class PsfKind { GaussianAnalytic, NumericSampled };

namespace detail {
struct SpectralTable;
}

/// Real, even, unit-normalized point-spread function.
///
/// The Gaussian kind is psi(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / 4 sigma^2)
/// and is evaluated in closed form. The numeric kind keeps samples of psi on a
/// uniform grid and evaluates overlaps through the power spectrum of those
/// samples, so derivatives of the overlap are taken under the integral
/// (multiplying by powers of k) instead of by differencing the overlap.
class PsfSpec {
 public:
  static PsfSpec gaussian(double sigma);

  /// Samples `psi` on the quadrature grid. Throws QuadratureError if the
  /// samples are not normalized or not resolved by the grid.
  static PsfSpec sampled(double sigma, const std::function<double(double)>& psi, Quadrature quad = {});

  /// `samples[j]` is psi at -halfwidth + j * (2 halfwidth / (node_count - 1)).
  static PsfSpec from_samples(double sigma, std::vector<double> samples, Quadrature quad = {});

  PsfKind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }
  const Quadrature& quadrature() const noexcept { return quad_; }

  /// psi(x); for the numeric kind, linear interpolation of the samples.
  double value(double x) const;

  /// Trapezoid estimate of the integral of psi^2 (1 for the analytic kind).
  double norm_squared() const;

  /// Convergence residual recorded at construction (0 for the analytic kind).
  double residual() const noexcept { return residual_; }

  const detail::SpectralTable* spectral() const noexcept { return table_.get(); }

 private:
  PsfSpec(PsfKind kind, double sigma, Quadrature quad) : kind_(kind), sigma_(sigma), quad_(quad) {}

  PsfKind kind_;
  double sigma_;
  Quadrature quad_;
  double residual_ = 0.0;
  std::vector<double> samples_;
  std::shared_ptr<const detail::SpectralTable> table_;
};

/// Every overlap-derived scalar at one separation.
struct OverlapCalculus {
  double s = 0.0;
  double eta = 0.0;
  double delta = 0.0;            ///< overlap of the two displaced PSFs
  double one_minus_delta = 0.0;  ///< 1 - delta without cancellation
  double gamma = 0.0;            ///< delta'(s)
  double beta = 0.0;             ///< -delta''(s)
  double dk2 = 0.0;              ///< beta(0), the momentum variance
  double delta4_0 = 0.0;
  double delta6_0 = 0.0;
  double eps_plus2 = 0.0;
  double eps_minus2 = 0.0;
  double b_plus = 0.0;   ///< -eps_+ / (2 sqrt(1 + delta))
  double b_minus = 0.0;  ///< -eps_- / (2 sqrt(1 - delta))
  double eta_plus = 0.0;
  double eta_minus = 0.0;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
};

/// Linear-in-s coefficients of B_pm near s = 0.
struct BSlopes {
  double b_plus_slope = 0.0;
  /// The closed form quoted for the antisymmetric slope.
  double b_minus_slope = 0.0;
  /// lim B_-(s)/s from the Taylor series of delta. Differs from
  /// `b_minus_slope` in general; this is the value calculus_at converges to.
  double b_minus_limit = 0.0;
};

/// Integral of psi(x + s/2) psi(x - s/2). Requires s >= 0.
double delta(const PsfSpec& psf, double s);

/// 1 - delta(s), evaluated without subtracting nearly equal numbers.
double one_minus_delta(const PsfSpec& psf, double s);

/// d^order delta / ds^order at s, order in 1..6.
double delta_derivative(const PsfSpec& psf, double s, int order);

/// Requires s > 0 and 0 < eta <= 1/2.
OverlapCalculus calculus_at(const PsfSpec& psf, double s, double eta);

BSlopes b_small_s_expansion(const PsfSpec& psf);

}  // namespace superres
