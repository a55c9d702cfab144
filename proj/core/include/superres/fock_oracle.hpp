#pragma once

#include <Eigen/Dense>

#include "superres/overlap.hpp"
#include "superres/scene.hpp"

namespace superres {

/// Diagonal of a thermal state truncated to `cutoff` levels.
struct ThermalFock {
  Eigen::VectorXd weights;  ///< renormalized p_k, k < cutoff
  double tail_mass = 0.0;   ///< 1 - sum of the untruncated p_k

  Eigen::MatrixXd rho() const { return weights.asDiagonal(); }
  double mean_photons() const;
};

/// p_k = n^k / (n + 1)^(k + 1). Throws CutoffError when the tail mass
/// exceeds `tail_bound`.
ThermalFock thermal_fock(double n_mean, int cutoff, double tail_bound = 1e-10);

/// exp(angle (a b^dag - a^dag b)) on the truncated two-mode space, basis
/// index n_a * cutoff + n_b. Built block by block over n_a + n_b.
Eigen::MatrixXd beam_splitter_fock(double angle, int cutoff);

/// Two-mode density matrix, basis index n_a * cutoff + n_b.
struct TruncatedState {
  int cutoff = 0;
  Eigen::MatrixXd rho;
  double tail_mass = 0.0;  ///< largest single-mode tail mass
};

/// U(angle) [rho_T(n_a) (x) rho_T(n_b)] U(angle)^dag.
TruncatedState two_mode_state(double n_a, double n_b, double angle, int cutoff, double tail_bound = 1e-10);

struct OracleOptions {
  int cutoff = 25;
  double fd_step = 0.0;  ///< finite-difference step; <= 0 means 1e-4 sigma
  double tail_bound = 1e-10;
  double eigen_floor = 1e-11;  ///< pairs with p_i + p_j below this are dropped
  double richardson_tolerance = 1e-5;
};

struct OracleResult {
  double h_plus = 0.0;
  double h_minus = 0.0;
  double h_total = 0.0;
  int cutoff = 0;
  double tail_mass = 0.0;
  double richardson_residual = 0.0;  ///< |H(h/2) - H(extrapolated)| / max(H, 1e-14 / sigma^2)
  double sld_residual = 0.0;         ///< max |(rho L + L rho)/2 - d rho| on the kept pairs
};

/// QFI of the two-mode thermal state by brute force in Fock space.
///
/// Each block holds the basis at s fixed and varies the occupation of a_pm
/// together with a beam splitter of angle B_pm h. The derivative is a central
/// difference at h and h/2 combined by Richardson extrapolation.
OracleResult oracle_qfi(const SceneParams& p, const PsfSpec& psf, const OverlapCalculus& oc,
                        const OracleOptions& opt = {});

}  // namespace superres
