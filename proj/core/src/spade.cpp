#include "superres/spade.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "superres/error.hpp"

namespace superres {

namespace {

constexpr double kConditionLimit = 1e12;

double poisson_arg(const SceneParams& p) { return p.s * p.s / (16.0 * p.sigma * p.sigma); }

double poisson_weight(double arg, int q) {
  if (q < 0) return 0.0;
  if (arg == 0.0) return q == 0 ? 1.0 : 0.0;
  return std::exp(-arg + q * std::log(arg) - std::lgamma(q + 1.0));
}

void require_modes(int mode_count) {
  if (mode_count < 1) throw ValidationError("mode_count must be >= 1");
}

}  // namespace

Eigen::VectorXd poisson_weights(double s, double sigma, int mode_count) {
  require_modes(mode_count);
  const double arg = s * s / (16.0 * sigma * sigma);
  Eigen::VectorXd f(mode_count);
  for (int q = 0; q < mode_count; ++q) f(q) = poisson_weight(arg, q);
  return f;
}

double spade_mean(const SceneParams& p, int q) {
  p.validate();
  if (q < 0) throw ValidationError("mode index must be >= 0");
  return 2.0 * p.signal() * poisson_weight(poisson_arg(p), q) + p.n_n + p.dark;
}

double spade_mean_deriv(const SceneParams& p, int q) {
  p.validate();
  if (q < 0) throw ValidationError("mode index must be >= 0");
  const double arg = poisson_arg(p);
  return p.signal() * p.s / (4.0 * p.sigma * p.sigma) * (poisson_weight(arg, q - 1) - poisson_weight(arg, q));
}

Eigen::MatrixXd spade_covariance(const SceneParams& p, int mode_count) {
  p.validate();
  require_modes(mode_count);
  const Eigen::VectorXd f = poisson_weights(p.s, p.sigma, mode_count);
  const double e = p.signal();
  const double nn = p.n_n;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(mode_count, mode_count);
  for (int q = 0; q < mode_count; ++q) {
    for (int r = q % 2; r < mode_count; r += 2) c(q, r) = 4.0 * e * e * f(q) * f(r);
    c(q, q) += 4.0 * e * nn * f(q) + 2.0 * e * f(q) + nn * nn + nn + p.dark;
  }
  return c;
}

SpadeStats spade_stats(const SceneParams& p, int mode_count) {
  p.validate();
  require_modes(mode_count);
  SpadeStats st;
  st.mode_count = mode_count;
  st.poisson_arg = poisson_arg(p);
  st.f = poisson_weights(p.s, p.sigma, mode_count);
  st.mu.resize(mode_count);
  st.mu_dot.resize(mode_count);
  for (int q = 0; q < mode_count; ++q) {
    st.mu(q) = spade_mean(p, q);
    st.mu_dot(q) = spade_mean_deriv(p, q);
  }
  st.c = spade_covariance(p, mode_count);

  if (st.mu_dot.cwiseAbs().maxCoeff() == 0.0) return st;

  std::vector<int> kept;
  for (int q = 0; q < mode_count; ++q) {
    if (st.c(q, q) > 0.0) {
      kept.push_back(q);
    } else if (st.mu_dot(q) != 0.0) {
      throw SingularSystemError("photocount covariance vanishes on a mode that carries signal",
                                std::numeric_limits<double>::infinity());
    }
  }
  const int m = static_cast<int>(kept.size());
  Eigen::MatrixXd cs(m, m);
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) {
    const double di = 1.0 / std::sqrt(st.c(kept[i], kept[i]));
    v(i) = st.mu_dot(kept[i]) * di;
    for (int j = 0; j < m; ++j) cs(i, j) = st.c(kept[i], kept[j]) * di / std::sqrt(st.c(kept[j], kept[j]));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cs, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  st.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (st.condition > kConditionLimit)
    throw SingularSystemError("photocount covariance is singular or ill-conditioned", st.condition);

  Eigen::LLT<Eigen::MatrixXd> llt(cs);
  if (llt.info() != Eigen::Success)
    throw SingularSystemError("photocount covariance is not positive definite", st.condition);
  st.fisher_bound = v.dot(llt.solve(v));
  return st;
}

double spade_cfi_bound(const SceneParams& p, int mode_count) { return spade_stats(p, mode_count).fisher_bound; }

double spade_mode_convergence(const SceneParams& p, int q_from, int q_to) {
  if (!(q_to > q_from && q_from >= 1)) throw ValidationError("mode convergence needs q_to > q_from >= 1");
  const double f_from = spade_cfi_bound(p, q_from);
  if (f_from == 0.0) throw ValidationError("mode convergence ratio undefined: F(q_from) = 0");
  return std::abs(spade_cfi_bound(p, q_to) - f_from) / f_from;
}

}  // namespace superres
