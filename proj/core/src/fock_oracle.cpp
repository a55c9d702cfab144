#include "superres/fock_oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <vector>

#include "superres/error.hpp"

namespace superres {

namespace {

// States |n_a, N - n_a> of fixed total photon number N inside the truncation.
struct PhotonBlock {
  int total = 0;
  int first_na = 0;
  int size = 0;
  int index(int k, int cutoff) const {
    const int na = first_na + k;
    return na * cutoff + (total - na);
  }
};

std::vector<PhotonBlock> photon_blocks(int cutoff) {
  std::vector<PhotonBlock> out;
  for (int n = 0; n <= 2 * (cutoff - 1); ++n) {
    const int lo = std::max(0, n - (cutoff - 1));
    const int hi = std::min(n, cutoff - 1);
    out.push_back({n, lo, hi - lo + 1});
  }
  return out;
}

// a b^dag - a^dag b restricted to one block.
Eigen::MatrixXd generator_block(const PhotonBlock& blk) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(blk.size, blk.size);
  for (int j = 0; j + 1 < blk.size; ++j) {
    // column j+1 has n_a = first + j + 1; a b^dag lowers n_a into row j
    const double na = blk.first_na + j + 1;
    const double nb = blk.total - na;
    const double amp = std::sqrt(na * (nb + 1.0));
    k(j, j + 1) = amp;
    k(j + 1, j) = -amp;
  }
  return k;
}

std::vector<Eigen::MatrixXd> unitary_blocks(const std::vector<PhotonBlock>& blocks, double angle) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(blocks.size());
  for (const auto& blk : blocks) {
    if (angle == 0.0) {
      out.push_back(Eigen::MatrixXd::Identity(blk.size, blk.size));
    } else {
      const Eigen::MatrixXd gen = angle * generator_block(blk);
      out.push_back(gen.exp());
    }
  }
  return out;
}

using Blocked = std::vector<Eigen::MatrixXd>;

Blocked blocked_state(const std::vector<PhotonBlock>& blocks, const ThermalFock& ta, const ThermalFock& tb,
                      double angle) {
  const Blocked u = unitary_blocks(blocks, angle);
  Blocked out;
  out.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& blk = blocks[i];
    Eigen::VectorXd d(blk.size);
    for (int k = 0; k < blk.size; ++k) {
      const int na = blk.first_na + k;
      d(k) = ta.weights(na) * tb.weights(blk.total - na);
    }
    out.push_back(u[i] * d.asDiagonal() * u[i].transpose());
  }
  return out;
}

struct Spectrum {
  std::vector<Eigen::VectorXd> p;
  std::vector<Eigen::MatrixXd> v;
};

Spectrum diagonalize(const Blocked& rho) {
  Spectrum sp;
  for (const auto& b : rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    sp.p.push_back(es.eigenvalues());
    sp.v.push_back(es.eigenvectors());
  }
  return sp;
}

double sld_information(const Spectrum& sp, const Blocked& drho, double floor) {
  double h = 0.0;
  for (std::size_t b = 0; b < drho.size(); ++b) {
    const Eigen::MatrixXd m = sp.v[b].transpose() * drho[b] * sp.v[b];
    const auto& p = sp.p[b];
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        const double den = p(i) + p(j);
        if (den > floor) h += 2.0 * m(i, j) * m(i, j) / den;
      }
  }
  return h;
}

// Rebuilds L from its spectral form and checks the Lyapunov identity on the
// retained pairs, in the Fock basis.
double sld_residual(const Spectrum& sp, const Blocked& rho, const Blocked& drho, double floor) {
  double worst = 0.0;
  for (std::size_t b = 0; b < drho.size(); ++b) {
    const auto& v = sp.v[b];
    const auto& p = sp.p[b];
    const Eigen::MatrixXd m = v.transpose() * drho[b] * v;
    Eigen::MatrixXd lp = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        const double den = p(i) + p(j);
        if (den > floor) lp(i, j) = 2.0 * m(i, j) / den;
      }
    const Eigen::MatrixXd l = v * lp * v.transpose();
    const Eigen::MatrixXd r = 0.5 * (rho[b] * l + l * rho[b]) - drho[b];
    const Eigen::MatrixXd rr = v.transpose() * r * v;
    for (int i = 0; i < rr.rows(); ++i)
      for (int j = 0; j < rr.cols(); ++j)
        if (p(i) + p(j) > floor) worst = std::max(worst, std::abs(rr(i, j)));
  }
  return worst;
}

Blocked combine(const Blocked& a, const Blocked& b, double ca, double cb) {
  Blocked out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

struct BlockOutcome {
  double h = 0.0;
  double tail = 0.0;
  double richardson = 0.0;
  double sld = 0.0;
};

BlockOutcome oracle_block(const SceneParams& p, const PsfSpec& psf, double b_coeff, bool plus, double step,
                          const OracleOptions& opt) {
  const int d = opt.cutoff;
  const auto blocks = photon_blocks(d);
  const double e = p.signal();
  BlockOutcome out;

  auto state_at = [&](double h) {
    const double w = plus ? 1.0 + delta(psf, p.s + h) : one_minus_delta(psf, p.s + h);
    const ThermalFock ta = thermal_fock(e * w + p.n_n, d, opt.tail_bound);
    const ThermalFock tb = thermal_fock(p.n_n, d, opt.tail_bound);
    out.tail = std::max({out.tail, ta.tail_mass, tb.tail_mass});
    return blocked_state(blocks, ta, tb, b_coeff * h);
  };

  const Blocked rho0 = state_at(0.0);
  const Blocked d1 = combine(state_at(step), state_at(-step), 0.5 / step, -0.5 / step);
  const Blocked d2 = combine(state_at(step / 2), state_at(-step / 2), 1.0 / step, -1.0 / step);
  const Blocked dr = combine(d2, d1, 4.0 / 3.0, -1.0 / 3.0);

  const Spectrum sp = diagonalize(rho0);
  out.h = sld_information(sp, dr, opt.eigen_floor);
  const double h_half = sld_information(sp, d2, opt.eigen_floor);
  // Relative, with an absolute floor so a signal-free state (H at roundoff
  // level) does not report noise over noise.
  const double floor = 1e-14 / (p.sigma * p.sigma);
  out.richardson = std::abs(h_half - out.h) / std::max(out.h, floor);
  out.sld = sld_residual(sp, rho0, dr, opt.eigen_floor);
  return out;
}

}  // namespace

double ThermalFock::mean_photons() const {
  double m = 0.0;
  for (int k = 0; k < weights.size(); ++k) m += k * weights(k);
  return m;
}

ThermalFock thermal_fock(double n_mean, int cutoff, double tail_bound) {
  if (!(n_mean >= 0.0) || !std::isfinite(n_mean)) throw ValidationError("thermal_fock: n_mean must be >= 0");
  if (cutoff < 2) throw ValidationError("thermal_fock: cutoff must be >= 2");
  ThermalFock t;
  t.weights.resize(cutoff);
  const double ratio = n_mean / (n_mean + 1.0);
  double pk = 1.0 / (n_mean + 1.0);
  for (int k = 0; k < cutoff; ++k) {
    t.weights(k) = pk;
    pk *= ratio;
  }
  t.tail_mass = std::pow(ratio, cutoff);
  if (t.tail_mass > tail_bound) throw CutoffError("thermal state does not fit in the Fock cutoff", t.tail_mass);
  t.weights /= t.weights.sum();
  return t;
}

Eigen::MatrixXd beam_splitter_fock(double angle, int cutoff) {
  if (cutoff < 2) throw ValidationError("beam_splitter_fock: cutoff must be >= 2");
  const auto blocks = photon_blocks(cutoff);
  const auto u = unitary_blocks(blocks, angle);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(cutoff * cutoff, cutoff * cutoff);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < blocks[b].size; ++i)
      for (int j = 0; j < blocks[b].size; ++j)
        out(blocks[b].index(i, cutoff), blocks[b].index(j, cutoff)) = u[b](i, j);
  return out;
}

TruncatedState two_mode_state(double n_a, double n_b, double angle, int cutoff, double tail_bound) {
  const ThermalFock ta = thermal_fock(n_a, cutoff, tail_bound);
  const ThermalFock tb = thermal_fock(n_b, cutoff, tail_bound);
  const auto blocks = photon_blocks(cutoff);
  const Blocked rho = blocked_state(blocks, ta, tb, angle);
  TruncatedState out;
  out.cutoff = cutoff;
  out.tail_mass = std::max(ta.tail_mass, tb.tail_mass);
  out.rho = Eigen::MatrixXd::Zero(cutoff * cutoff, cutoff * cutoff);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < blocks[b].size; ++i)
      for (int j = 0; j < blocks[b].size; ++j)
        out.rho(blocks[b].index(i, cutoff), blocks[b].index(j, cutoff)) = rho[b](i, j);
  return out;
}

OracleResult oracle_qfi(const SceneParams& p, const PsfSpec& psf, const OverlapCalculus& oc,
                        const OracleOptions& opt) {
  p.validate(true);
  if (opt.cutoff < 2) throw ValidationError("oracle_qfi: cutoff must be >= 2");
  if (oc.s != p.s) throw ValidationError("oracle_qfi: overlap calculus evaluated at a different s");
  const double step = opt.fd_step > 0.0 ? opt.fd_step : 1e-4 * p.sigma;
  if (step > p.s / 10.0) throw ValidationError("oracle_qfi: fd_step must be small compared with s");

  const BlockOutcome plus = oracle_block(p, psf, oc.b_plus, true, step, opt);
  const BlockOutcome minus = oracle_block(p, psf, oc.b_minus, false, step, opt);

  OracleResult r;
  r.h_plus = plus.h;
  r.h_minus = minus.h;
  r.h_total = plus.h + minus.h;
  r.cutoff = opt.cutoff;
  r.tail_mass = std::max(plus.tail, minus.tail);
  r.richardson_residual = std::max(plus.richardson, minus.richardson);
  r.sld_residual = std::max(plus.sld, minus.sld);
  if (r.richardson_residual > opt.richardson_tolerance)
    throw NumericalError("oracle finite-difference estimates disagree", r.richardson_residual);
  return r;
}

}  // namespace superres
