#include "superres/gaussian_qfi.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "superres/error.hpp"

namespace superres {

namespace {

using Quad = boost::multiprecision::float128;
using Mat4q = Eigen::Matrix<Quad, 4, 4>;
using Mat16q = Eigen::Matrix<Quad, 16, 16>;
using Vec16q = Eigen::Matrix<Quad, 16, 1>;

// Pivots below this fraction of the largest one are treated as exact zeros
// (a vacuum mode). Genuine pivots on the validated parameter range stay
// above ~1e-12 relative; roundoff in quadruple precision sits near 1e-33.
const Quad kRankThreshold = Quad(1e-26);

Mat4q to_quad(const Eigen::Matrix4d& m) { return m.cast<Quad>(); }

Mat4q omega_q() { return CovBlock::omega().cast<Quad>(); }

// Column-major vec: vec(A X B) = (B^T (x) A) vec(X).
Mat16q kron(const Mat4q& a, const Mat4q& b) {
  Mat16q out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
  return out;
}

struct QuadSolution {
  Mat4q g;
  Quad residual;
};

QuadSolution solve_g_quad(const CovBlock& block) {
  const Mat4q v = to_quad(block.excess) + Mat4q::Identity() / 2;
  const Mat4q om = omega_q();
  const Mat16q lhs = 4 * kron(v, v) + kron(om.transpose(), om);

  const Mat4q dv = to_quad(block.dv);
  Vec16q rhs;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) rhs(i + 4 * j) = -2 * dv(i, j);

  Eigen::CompleteOrthogonalDecomposition<Mat16q> cod(lhs);
  cod.setThreshold(kRankThreshold);
  const Vec16q x = cod.solve(rhs);

  const Quad res = (lhs * x - rhs).cwiseAbs().maxCoeff();
  const Quad scale = lhs.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
  if (res > Quad(1e-24) * scale && res > Quad(1e-280)) {
    throw SingularSystemError("G equation has no solution (inconsistent singular system)",
                              static_cast<double>(res));
  }

  Mat4q g;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) g(i, j) = x(i + 4 * j);
  const Mat4q sym = (g + g.transpose()) / 2;
  return {sym, res};
}

// H = -Tr[G dV] accumulated in quadruple precision.
double trace_information(const Mat4q& g, const Eigen::Matrix4d& dv) {
  return static_cast<double>(-(g * to_quad(dv)).trace());
}

GBlock make_gblock(const CovBlock& block, const Mat4q& gq) {
  GBlock out;
  out.g = gq.cast<double>();
  out.g11 = out.g(0, 0);
  out.g12 = out.g(0, 2);
  out.g22 = out.g(2, 2);
  out.residual = g_equation_residual(block, out.g);
  return out;
}

// Occupation of mode a_pm: eta N_s (1 pm delta) + N_n.
double signal_weight(const OverlapCalculus& oc, Block which) {
  return which == Block::Plus ? 1.0 + oc.delta : oc.one_minus_delta;
}

double eps2(const OverlapCalculus& oc, Block which) {
  return which == Block::Plus ? oc.eps_plus2 : oc.eps_minus2;
}

double closed_form_block(const SceneParams& p, const OverlapCalculus& oc, Block which) {
  const double e = p.signal();
  if (e == 0.0) return 0.0;
  const double w = signal_weight(oc, which);
  const double nn = p.n_n;
  const double n = e * w + nn;
  const double g2 = oc.gamma * oc.gamma;

  // Occupation change of a_pm. At n_n = 0 one factor of e*w cancels against
  // the numerator, which keeps the antisymmetric term finite as w -> 0.
  const double population = (nn == 0.0) ? e * g2 / ((n + 1.0) * w) : e * e * g2 / ((n + 1.0) * n);
  // Mode-shape change a_pm -> b_pm. (2N_n + 1)(2n + 1) - 1 expanded so that
  // nothing cancels.
  const double shape = 2.0 * e * e * w * eps2(oc, which) / (4.0 * nn * n + 2.0 * nn + 2.0 * n);
  return population + shape;
}

void require_calculus(const SceneParams& p, const OverlapCalculus& oc) {
  p.validate();
  if (!(oc.s > 0.0)) {
    throw ValidationError(
        "quantum Fisher information needs s > 0; at s = 0 with n_n = 0 it is indeterminate, use "
        "the small-s asymptotics");
  }
}

}  // namespace

Eigen::Matrix4d CovBlock::omega() {
  Eigen::Matrix4d om = Eigen::Matrix4d::Zero();
  om(0, 1) = 1.0;
  om(1, 0) = -1.0;
  om(2, 3) = 1.0;
  om(3, 2) = -1.0;
  return om;
}

double CovBlock::uncertainty_margin() const {
  const Eigen::Matrix4cd m = v().cast<std::complex<double>>() +
                             std::complex<double>(0.0, 0.5) * omega().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CovBlock make_cov_block(const SceneParams& p, const OverlapCalculus& oc, Block which) {
  const double e = p.signal();
  const double w = signal_weight(oc, which);
  const double occ_a = e * w + p.n_n;
  const double b_abs = std::abs(which == Block::Plus ? oc.b_plus : oc.b_minus);
  const double d_occ = (which == Block::Plus ? 1.0 : -1.0) * e * oc.gamma;
  // -(v2 - v1) = eta N_s (1 pm delta)
  const double coupling = e * w * b_abs;

  CovBlock block;
  block.label = which;
  block.excess.diagonal() << occ_a, occ_a, p.n_n, p.n_n;
  for (int q = 0; q < 2; ++q) {
    block.dv(q, q) = d_occ;
    block.dv(q, 2 + q) = coupling;
    block.dv(2 + q, q) = coupling;
  }
  return block;
}

Eigen::Matrix4d solve_g(const CovBlock& block) { return solve_g_quad(block).g.cast<double>(); }

double g_equation_residual(const CovBlock& block, const Eigen::Matrix4d& g) {
  // With V = I/2 + W: 4VGV = G + 2(WG + GW) + 4WGW. For G = g (x) I_2 the
  // first term cancels exactly against Omega G Omega.
  const Mat4q gq = to_quad(g);
  const Mat4q w = to_quad(block.excess);
  const Mat4q om = omega_q();
  const Mat4q r = (gq + om * gq * om) + 2 * (w * gq + gq * w) + 4 * w * gq * w + 2 * to_quad(block.dv);
  return static_cast<double>(r.cwiseAbs().maxCoeff());
}

GaussianQfiResult qfi_closed_form(const SceneParams& p, const OverlapCalculus& oc) {
  require_calculus(p, oc);
  GaussianQfiResult r;
  r.h_plus = closed_form_block(p, oc, Block::Plus);
  r.h_minus = closed_form_block(p, oc, Block::Minus);
  r.h_total = r.h_plus + r.h_minus;
  return r;
}

GaussianQfiResult qfi_general(const SceneParams& p, const OverlapCalculus& oc) {
  require_calculus(p, oc);
  GaussianQfiResult r;
  const CovBlock plus = make_cov_block(p, oc, Block::Plus);
  const CovBlock minus = make_cov_block(p, oc, Block::Minus);
  const QuadSolution sp = solve_g_quad(plus);
  const QuadSolution sm = solve_g_quad(minus);
  r.h_plus = trace_information(sp.g, plus.dv);
  r.h_minus = trace_information(sm.g, minus.dv);
  r.h_total = r.h_plus + r.h_minus;
  r.g_plus = make_gblock(plus, sp.g);
  r.g_minus = make_gblock(minus, sm.g);
  return r;
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::LargeSnrSmallS: return "large-snr-small-s";
    case Regime::SubSStar: return "sub-sstar";
    case Regime::SmallSnr: return "small-snr";
    case Regime::LargeS: return "large-s";
  }
  return "unknown";
}

std::optional<Regime> parse_regime(std::string_view name) {
  for (Regime r : {Regime::LargeSnrSmallS, Regime::SubSStar, Regime::SmallSnr, Regime::LargeS})
    if (regime_name(r) == name) return r;
  return std::nullopt;
}

AsymptoticValue qfi_asymptotic(const SceneParams& p, const PsfSpec& psf, Regime regime) {
  p.validate();
  if (psf.kind() != PsfKind::GaussianAnalytic)
    throw ValidationError("asymptotic regimes are only available for the Gaussian PSF");
  if (psf.sigma() != p.sigma) throw ValidationError("PSF sigma does not match scene sigma");

  const double e = p.signal();
  const double nn = p.n_n;
  const double s = p.s;
  const double sg = p.sigma;
  const double var = sg * sg;
  const double dk2 = 1.0 / (4.0 * var);
  const double d4 = 3.0 / (16.0 * var * var);
  // No thermal noise counts as infinite SNR.
  const double snr = nn > 0.0 ? e / nn : std::numeric_limits<double>::infinity();

  AsymptoticValue out;
  switch (regime) {
    case Regime::LargeSnrSmallS: {
      out.valid = snr >= 10.0 && s <= 0.5 * sg;
      if (e == 0.0) return out;
      const double s2 = s * s;
      out.value = 4.0 * e * e * s2 / (e * e * s2 * s2 + 8.0 * e * s2 * var + 64.0 * nn * (nn + 1.0) * var * var);
      return out;
    }
    case Regime::SubSStar: {
      if (e == 0.0) {
        out.valid = false;
        return out;
      }
      if (nn == 0.0) throw ValidationError("the sub-s* regime requires n_n > 0");
      out.valid = snr >= 10.0 && s <= s_star(p).s_star / 3.0;
      out.value = e * e / (nn * (nn + 1.0)) * dk2 * dk2 * s * s;
      return out;
    }
    case Regime::SmallSnr: {
      out.valid = snr <= 0.1 && s <= 0.5 * sg;
      if (e == 0.0) return out;
      if (nn == 0.0) throw ValidationError("the small-SNR regime requires n_n > 0");
      out.value = e * e / (2.0 * nn * (nn + 1.0)) * (3.0 * dk2 * dk2 + d4) * s * s;
      return out;
    }
    case Regime::LargeS: {
      out.valid = s >= 5.0 * sg;
      if (e == 0.0) return out;
      out.value = 2.0 * e * e * dk2 / (2.0 * nn * nn + e + 2.0 * nn * (e + 1.0));
      return out;
    }
  }
  return out;
}

SStar s_star(const SceneParams& p) {
  p.validate();
  if (!(p.n_n > 0.0)) throw ValidationError("s* exists only with thermal noise (n_n > 0)");
  const double e = p.signal();
  if (!(e > 0.0)) throw ValidationError("s* requires a nonzero signal (eta * n_s > 0)");
  const double nn = p.n_n;
  const double q = nn * nn + nn;
  const double r = std::sqrt(q);
  SStar out;
  out.s_star = 2.0 * std::numbers::sqrt2 * std::pow(q, 0.25) * p.sigma / std::sqrt(e);
  out.h_at_s_star = e / (2.0 * p.sigma * p.sigma) * r / ((nn + r) * (r + nn + 1.0));
  out.valid = e / nn >= 10.0;
  return out;
}

BlockMeasurement diagonalize_block(double g11, double g12, double g22) {
  BlockMeasurement m;
  const double diff = g11 - g22;
  if (g12 == 0.0 && diff == 0.0) {
    m.degenerate = true;
    m.angle = 0.0;
  } else if (diff == 0.0) {
    m.angle = std::copysign(std::numbers::pi / 4.0, g12);
  } else {
    m.angle = 0.5 * std::atan(2.0 * g12 / diff);
  }
  const double c = std::cos(m.angle);
  const double s = std::sin(m.angle);
  Eigen::Matrix2d o;
  o << c, s, -s, c;
  Eigen::Matrix2d g;
  g << g11, g12, g12, g22;
  m.rotated = o * g * o.transpose();
  m.g1 = m.rotated(0, 0);
  m.g2 = m.rotated(1, 1);
  return m;
}

MeasurementPlan optimal_measurement(const GaussianQfiResult& result) {
  if (!result.g_plus || !result.g_minus)
    throw ValidationError("optimal_measurement needs the G matrices from qfi_general");
  MeasurementPlan plan;
  plan.plus = diagonalize_block(result.g_plus->g11, result.g_plus->g12, result.g_plus->g22);
  plan.minus = diagonalize_block(result.g_minus->g11, result.g_minus->g12, result.g_minus->g22);
  return plan;
}

}  // namespace superres
