#pragma once

#include <vector>

#include <Eigen/Dense>

#include "superres/scene.hpp"

namespace superres {

/// Photon-counting statistics of the first Q Hermite-Gaussian modes
/// (Gaussian PSF), in the Gaussian-moment approximation.
struct SpadeStats {
  int mode_count = 15;
  double poisson_arg = 0.0;  ///< s^2 / (16 sigma^2)
  Eigen::VectorXd f;         ///< f_q = e^-Q Q^q / q!
  Eigen::VectorXd mu;
  Eigen::VectorXd mu_dot;
  Eigen::MatrixXd c;
  double fisher_bound = 0.0;
  double condition = 0.0;  ///< of the diagonally scaled covariance on the kept modes
};

/// f_0 .. f_{mode_count-1}.
Eigen::VectorXd poisson_weights(double s, double sigma, int mode_count);

/// 2 eta N_s f_q + N_n + D.
double spade_mean(const SceneParams& p, int q);

/// eta N_s s / (4 sigma^2) (f_{q-1} - f_q), f_{-1} = 0.
double spade_mean_deriv(const SceneParams& p, int q);

/// Photocount covariance. Odd q - q' entries vanish; dark counts add D to
/// the diagonal only.
Eigen::MatrixXd spade_covariance(const SceneParams& p, int mode_count);

/// mu, mu_dot, C and the bound mu_dot^T C^-1 mu_dot.
///
/// C is equilibrated by its diagonal before the Cholesky solve; a scaled
/// condition number above 1e12 throws SingularSystemError. Modes with no
/// counts and no signal derivative carry no information and are skipped.
SpadeStats spade_stats(const SceneParams& p, int mode_count = 15);

double spade_cfi_bound(const SceneParams& p, int mode_count = 15);

/// |F(q_to) - F(q_from)| / F(q_from). Requires q_to > q_from >= 1.
double spade_mode_convergence(const SceneParams& p, int q_from, int q_to);

}  // namespace superres
