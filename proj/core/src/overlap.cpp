#include "superres/overlap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "superres/error.hpp"

namespace superres {

namespace detail {

// Power spectrum rho(k) = |Psi(k)|^2 of the sampled PSF on k_m = m dk,
// m = 0..M, pre-multiplied by the trapezoid weight and 1/pi so that
//   delta^(n)(s) = sum_m weight_m k_m^n cos(k_m s + n pi / 2).
// dk corresponds to zero-padding the sample window to twice its length, so
// the periodic image of the autocorrelation sits beyond every separation the
// window can represent.
struct SpectralTable {
  std::vector<double> k;
  std::vector<double> weight;
};

}  // namespace detail

namespace {

constexpr int kMaxOrder = 6;

double resolved_halfwidth(const Quadrature& q, double sigma) {
  return q.halfwidth > 0.0 ? q.halfwidth : 12.0 * sigma;
}

void check_sigma(double sigma) {
  if (!(std::isfinite(sigma) && sigma > 0.0)) throw ValidationError("PSF sigma must be finite and > 0");
}

void check_separation(double s) {
  if (!(std::isfinite(s) && s >= 0.0)) throw ValidationError("separation must be finite and >= 0");
}

double trapezoid_norm(const std::vector<double>& samples, double h) {
  double acc = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double w = (j == 0 || j + 1 == samples.size()) ? 0.5 : 1.0;
    acc += w * samples[j] * samples[j];
  }
  return acc * h;
}

// Everything the numeric kind needs at one separation from a single pass over
// the spectrum. `moment[n]` is delta^(n)(s).
struct SpectralEval {
  std::array<double, kMaxOrder + 1> moment{};
  double one_minus_delta = 0.0;
};

SpectralEval spectral_eval(const detail::SpectralTable& t, double s, int max_order) {
  SpectralEval out;
  for (std::size_t m = 0; m < t.k.size(); ++m) {
    const double k = t.k[m];
    const double w = t.weight[m];
    const double c = std::cos(k * s);
    const double sn = std::sin(k * s);
    const double half = std::sin(0.5 * k * s);
    out.one_minus_delta += 2.0 * w * half * half;
    double kn = 1.0;
    for (int n = 0; n <= max_order; ++n) {
      // d^n/ds^n cos(ks) = k^n cos(ks + n pi/2)
      double phase = 0.0;
      switch (n % 4) {
        case 0: phase = c; break;
        case 1: phase = -sn; break;
        case 2: phase = -c; break;
        default: phase = sn; break;
      }
      out.moment[n] += w * kn * phase;
      kn *= k;
    }
  }
  return out;
}

// Physicists' Hermite polynomial by recurrence.
double hermite(int n, double x) {
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

// d^n/ds^n exp(-s^2 / 8 sigma^2). With z = s / (2 sqrt2 sigma) the overlap is
// exp(-z^2), whose n-th derivative is (-1)^n H_n(z) exp(-z^2).
double gaussian_derivative(double sigma, double s, int n) {
  const double var8 = 8.0 * sigma * sigma;
  const double z = s / std::sqrt(var8);
  double scale = std::pow(var8, n / 2);
  if (n % 2 == 1) scale *= std::sqrt(var8);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(n, z) * std::exp(-z * z) / scale;
}

// delta * (sinh u - u) for delta = exp(-u), u >= 0, without overflow or
// cancellation.
double delta_times_sinh_excess(double u) {
  if (u < 1.0) {
    // sinh u - u = sum_{k>=1} u^(2k+1) / (2k+1)!
    double term = u * u * u / 6.0;
    double sum = 0.0;
    for (int k = 1; k < 40 && term > 1e-18 * sum; ++k) {
      sum += term;
      term *= u * u / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return std::exp(-u) * sum;
  }
  return -0.5 * std::expm1(-2.0 * u) - u * std::exp(-u);
}

void require_order(int order) {
  if (order < 1 || order > kMaxOrder) throw ValidationError("derivative order must be in 1..6");
}

}  // namespace

PsfSpec PsfSpec::gaussian(double sigma) {
  check_sigma(sigma);
  return PsfSpec(PsfKind::GaussianAnalytic, sigma, Quadrature{});
}

PsfSpec PsfSpec::sampled(double sigma, const std::function<double(double)>& psi, Quadrature quad) {
  check_sigma(sigma);
  if (quad.node_count < 3) throw ValidationError("quadrature needs at least 3 nodes");
  const double hw = resolved_halfwidth(quad, sigma);
  const double h = 2.0 * hw / (quad.node_count - 1);
  std::vector<double> samples(static_cast<std::size_t>(quad.node_count));
  for (int j = 0; j < quad.node_count; ++j) samples[static_cast<std::size_t>(j)] = psi(-hw + j * h);
  return from_samples(sigma, std::move(samples), quad);
}

PsfSpec PsfSpec::from_samples(double sigma, std::vector<double> samples, Quadrature quad) {
  check_sigma(sigma);
  if (quad.node_count < 3) throw ValidationError("quadrature needs at least 3 nodes");
  if (samples.size() != static_cast<std::size_t>(quad.node_count))
    throw ValidationError("sample count does not match quadrature node count");
  if (!(quad.abs_tolerance > 0.0)) throw ValidationError("quadrature tolerance must be > 0");
  for (double v : samples)
    if (!std::isfinite(v)) throw ValidationError("PSF samples must be finite");

  quad.halfwidth = resolved_halfwidth(quad, sigma);
  PsfSpec psf(PsfKind::NumericSampled, sigma, quad);
  const double hw = quad.halfwidth;
  const int n_nodes = quad.node_count;
  const double h = 2.0 * hw / (n_nodes - 1);

  const double norm2 = trapezoid_norm(samples, h);
  const double norm_residual = std::abs(norm2 - 1.0);

  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(samples.front()), std::abs(samples.back()));
  const double edge_residual = peak > 0.0 ? (edge / peak) * (edge / peak) : 1.0;

  auto table = std::make_shared<detail::SpectralTable>();
  const std::size_t m_count = static_cast<std::size_t>(n_nodes);
  const double dk = 2.0 * std::numbers::pi / (4.0 * hw);
  table->k.resize(m_count);
  table->weight.resize(m_count);
  double top_band = 0.0;
  double total_band = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    const double k = static_cast<double>(m) * dk;
    double re = 0.0;
    double im = 0.0;
    for (int j = 0; j < n_nodes; ++j) {
      const double w = (j == 0 || j == n_nodes - 1) ? 0.5 : 1.0;
      const double x = -hw + j * h;
      const double v = w * samples[static_cast<std::size_t>(j)];
      re += v * std::cos(k * x);
      im -= v * std::sin(k * x);
    }
    re *= h;
    im *= h;
    const double rho = (re * re + im * im) / norm2;
    const double end_weight = (m == 0 || m + 1 == m_count) ? 0.5 : 1.0;
    table->k[m] = k;
    table->weight[m] = end_weight * dk / std::numbers::pi * rho;

    // Weighted by k^2 (the momentum variance). Higher powers mostly measure
    // the roundoff floor of the transform near the Nyquist frequency.
    const double k2 = k * k;
    total_band += rho * k2;
    if (m >= m_count / 2) top_band += rho * k2;
  }
  const double band_residual = total_band > 0.0 ? top_band / total_band : 1.0;

  psf.residual_ = std::max({norm_residual, edge_residual, band_residual});
  if (norm_residual > quad.abs_tolerance)
    throw QuadratureError("PSF samples are not unit-normalized", norm_residual);
  if (edge_residual > quad.abs_tolerance)
    throw QuadratureError("PSF does not decay inside the sampling window", edge_residual);
  if (band_residual > quad.abs_tolerance)
    throw QuadratureError("PSF spectrum is not resolved by the sampling grid", band_residual);

  psf.samples_ = std::move(samples);
  psf.table_ = std::move(table);
  return psf;
}

double PsfSpec::value(double x) const {
  if (kind_ == PsfKind::GaussianAnalytic) {
    const double norm = std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.25);
    return norm * std::exp(-x * x / (4.0 * sigma_ * sigma_));
  }
  const double hw = quad_.halfwidth;
  if (x <= -hw || x >= hw) return 0.0;
  const double h = 2.0 * hw / (quad_.node_count - 1);
  const double pos = (x + hw) / h;
  const auto j = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(j);
  if (j + 1 >= samples_.size()) return samples_.back();
  return (1.0 - frac) * samples_[j] + frac * samples_[j + 1];
}

double PsfSpec::norm_squared() const {
  if (kind_ == PsfKind::GaussianAnalytic) return 1.0;
  const double h = 2.0 * quad_.halfwidth / (quad_.node_count - 1);
  return trapezoid_norm(samples_, h);
}

double delta(const PsfSpec& psf, double s) {
  check_separation(s);
  if (psf.kind() == PsfKind::GaussianAnalytic) {
    return std::exp(-s * s / (8.0 * psf.sigma() * psf.sigma()));
  }
  return spectral_eval(*psf.spectral(), s, 0).moment[0];
}

double one_minus_delta(const PsfSpec& psf, double s) {
  check_separation(s);
  if (psf.kind() == PsfKind::GaussianAnalytic) {
    return -std::expm1(-s * s / (8.0 * psf.sigma() * psf.sigma()));
  }
  return spectral_eval(*psf.spectral(), s, 0).one_minus_delta;
}

double delta_derivative(const PsfSpec& psf, double s, int order) {
  require_order(order);
  if (!std::isfinite(s)) throw ValidationError("separation must be finite");
  if (psf.kind() == PsfKind::GaussianAnalytic) return gaussian_derivative(psf.sigma(), s, order);
  return spectral_eval(*psf.spectral(), s, order).moment[order];
}

OverlapCalculus calculus_at(const PsfSpec& psf, double s, double eta) {
  if (!(std::isfinite(s) && s > 0.0))
    throw ValidationError("calculus_at requires s > 0; use the small-s expansions at s = 0");
  if (!(std::isfinite(eta) && eta > 0.0 && eta <= 0.5)) throw ValidationError("eta must lie in (0, 1/2]");

  OverlapCalculus oc;
  oc.s = s;
  oc.eta = eta;
  const double sigma = psf.sigma();

  if (psf.kind() == PsfKind::GaussianAnalytic) {
    const double var = sigma * sigma;
    const double u = s * s / (8.0 * var);
    oc.delta = std::exp(-u);
    oc.one_minus_delta = -std::expm1(-u);
    oc.gamma = -(s / (4.0 * var)) * oc.delta;
    oc.beta = (1.0 - 2.0 * u) * oc.delta / (4.0 * var);
    oc.dk2 = 1.0 / (4.0 * var);
    oc.delta4_0 = 3.0 / (16.0 * var * var);
    oc.delta6_0 = -15.0 / (64.0 * var * var * var);
    // The defining combinations rearranged so that no two nearly equal terms
    // are subtracted; eps_-^2 is O(s^4) while its three terms are O(1).
    oc.eps_plus2 = oc.one_minus_delta / (4.0 * var) + u * oc.delta / (2.0 * var * (1.0 + oc.delta));
    oc.eps_minus2 = delta_times_sinh_excess(u) / (2.0 * var * oc.one_minus_delta);
  } else {
    const auto& table = *psf.spectral();
    const SpectralEval at_s = spectral_eval(table, s, 2);
    const SpectralEval at_0 = spectral_eval(table, 0.0, kMaxOrder);
    oc.delta = at_s.moment[0];
    oc.one_minus_delta = at_s.one_minus_delta;
    oc.gamma = at_s.moment[1];
    oc.beta = -at_s.moment[2];
    oc.dk2 = -at_0.moment[2];
    oc.delta4_0 = at_0.moment[4];
    oc.delta6_0 = at_0.moment[6];

    const double tol = 1e-12 / (sigma * sigma);
    auto settle = [tol](double eps2, const char* which) {
      if (eps2 >= 0.0) return eps2;
      if (eps2 > -tol) return 0.0;
      throw ConsistencyError(std::string(which) + " is negative beyond tolerance", eps2);
    };
    oc.eps_plus2 =
        settle(oc.dk2 - oc.beta - oc.gamma * oc.gamma / (1.0 + oc.delta), "eps_+^2");
    oc.eps_minus2 =
        settle(oc.dk2 + oc.beta - oc.gamma * oc.gamma / oc.one_minus_delta, "eps_-^2");
  }

  oc.b_plus = -std::sqrt(oc.eps_plus2) / (2.0 * std::sqrt(1.0 + oc.delta));
  oc.b_minus = -std::sqrt(oc.eps_minus2) / (2.0 * std::sqrt(oc.one_minus_delta));
  oc.eta_plus = (1.0 + oc.delta) * eta;
  oc.eta_minus = oc.one_minus_delta * eta;
  oc.theta_plus = std::acos(std::sqrt(std::min(1.0, oc.eta_plus)));
  oc.theta_minus = std::acos(std::sqrt(std::min(1.0, oc.eta_minus)));
  return oc;
}

BSlopes b_small_s_expansion(const PsfSpec& psf) {
  const double d2 = delta_derivative(psf, 0.0, 2);
  const double d4 = delta_derivative(psf, 0.0, 4);
  const double d6 = delta_derivative(psf, 0.0, 6);
  const double scale4 = std::abs(d4) + d2 * d2;
  const double scale6 = (std::abs(d6) + d4 * d4 / std::abs(d2)) / std::abs(d2);

  auto root = [](double radicand, double scale, const char* which) {
    if (radicand >= 0.0) return std::sqrt(radicand);
    if (radicand > -1e-12 * scale) return 0.0;
    throw ConsistencyError(std::string("negative radicand in ") + which, radicand);
  };

  BSlopes out;
  out.b_plus_slope = -0.25 * root(d4 - d2 * d2, scale4, "B+ slope");
  out.b_minus_slope =
      -root((d6 / 5.0 - d4 * d4 / (3.0 * d2)) / (12.0 * d2), scale6 / 12.0, "B- slope");
  out.b_minus_limit = -root((d6 - d4 * d4 / d2) / (144.0 * d2), scale6 / 144.0, "B- limit");
  return out;
}

}  // namespace superres
