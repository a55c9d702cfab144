#pragma once

#include <array>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "superres/overlap.hpp"
#include "superres/scene.hpp"

namespace superres {

/// Symmetric (+) or antisymmetric (-) pair of modes (a_pm, b_pm).
enum class Block { Plus, Minus };

/// Covariance of one (a, b) mode pair in quadrature ordering (x_a, p_a, x_b, p_b)
/// with vacuum variance 1/2.
///
/// The covariance is stored as its excess over vacuum, V = I/2 + excess, so
/// occupations far below one photon keep their full precision.
struct CovBlock {
  Block label = Block::Plus;
  Eigen::Matrix4d excess = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d dv = Eigen::Matrix4d::Zero();  ///< dV/ds

  Eigen::Matrix4d v() const { return excess + 0.5 * Eigen::Matrix4d::Identity(); }
  static Eigen::Matrix4d omega();

  /// Smallest eigenvalue of V + i Omega / 2; a bona fide state has it >= 0.
  double uncertainty_margin() const;
};

/// Covariance block of the thermal-source model at separation `oc.s`.
CovBlock make_cov_block(const SceneParams& p, const OverlapCalculus& oc, Block which);

/// G for one block together with its 2x2 mode-space entries
/// (G = [[g11, g12], [g12, g22]] (x) I_2 for the thermal model).
struct GBlock {
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  double g11 = 0.0;
  double g12 = 0.0;
  double g22 = 0.0;
  double residual = 0.0;  ///< max-norm of 4VGV + Omega G Omega + 2 dV
};

struct GaussianQfiResult {
  double h_plus = 0.0;
  double h_minus = 0.0;
  double h_total = 0.0;
  std::optional<GBlock> g_plus;  ///< filled by qfi_general only
  std::optional<GBlock> g_minus;
};

/// Quantum Fisher information in closed form, summed over both blocks.
/// Requires s > 0 (s = 0 has no closed form when n_n = 0).
GaussianQfiResult qfi_closed_form(const SceneParams& p, const OverlapCalculus& oc);

/// Solves 4 V G V + Omega G Omega + 2 dV = 0 for symmetric G.
///
/// The 16x16 vectorized system is assembled and factored in quadruple
/// precision. Singular systems (a vacuum mode, 4 v^2 - 1 = 0) get the
/// minimum-norm solution; an inconsistent singular system throws
/// SingularSystemError carrying the residual.
Eigen::Matrix4d solve_g(const CovBlock& block);

/// Max-norm of 4 V G V + Omega G Omega + 2 dV, evaluated in quadruple
/// precision from the vacuum-excess form of V.
double g_equation_residual(const CovBlock& block, const Eigen::Matrix4d& g);

/// Quantum Fisher information from the general Gaussian-state formula
/// H = -Tr[G dV] on each block.
GaussianQfiResult qfi_general(const SceneParams& p, const OverlapCalculus& oc);

enum class Regime { LargeSnrSmallS, SubSStar, SmallSnr, LargeS };

std::string_view regime_name(Regime r);
std::optional<Regime> parse_regime(std::string_view name);

struct AsymptoticValue {
  double value = 0.0;
  bool valid = false;  ///< whether p sits inside the regime's validity window
};

/// Closed-form approximation of H for the Gaussian PSF. The validity window
/// is: SNR >= 10 for "large SNR", SNR <= 1/10 for "small SNR",
/// s <= s*/3, s <= sigma/2 for "small s", s >= 5 sigma for "large s".
AsymptoticValue qfi_asymptotic(const SceneParams& p, const PsfSpec& psf, Regime regime);

struct SStar {
  double s_star = 0.0;
  double h_at_s_star = 0.0;
  bool valid = false;  ///< SNR >= 10
};

/// Location and height of the small-s local maximum of H (Gaussian PSF).
/// Throws ValidationError when n_n == 0, where no such maximum exists.
SStar s_star(const SceneParams& p);

struct BlockMeasurement {
  double angle = 0.0;  ///< beam-splitter angle theta
  double g1 = 0.0;     ///< eigenvalues of the 2x2 mode-space block
  double g2 = 0.0;
  bool degenerate = false;  ///< g11 - g22 = g12 = 0, angle is arbitrary
  Eigen::Matrix2d rotated = Eigen::Matrix2d::Zero();  ///< O g O^T
};

struct MeasurementPlan {
  BlockMeasurement plus;
  BlockMeasurement minus;
};

/// Rotation O = [[cos t, sin t], [-sin t, cos t]] with O g O^T diagonal.
BlockMeasurement diagonalize_block(double g11, double g12, double g22);

/// Beam splitters that decouple each G block; photon counting after them is
/// optimal. Requires the G matrices from qfi_general.
MeasurementPlan optimal_measurement(const GaussianQfiResult& result);

}  // namespace superres
