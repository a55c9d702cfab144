#pragma once

#include <optional>

namespace superres {

/// Physical scenario for two identical incoherent sources.
///
/// Lengths (`s`, `sigma`) share one unit; photon numbers are per mode and
/// per exposure. Only the product `eta * n_s` enters the thermal-source
/// model, but `eta` is kept separately because the attenuation angles
/// arccos(sqrt(eta_pm)) need it on its own.
struct SceneParams {
  double s = 0.0;      ///< source separation
  double sigma = 1.0;  ///< PSF width
  double eta = 0.5;    ///< attenuation, in (0, 1/2]
  double n_s = 0.0;    ///< mean photons per source before attenuation
  double n_n = 0.0;    ///< thermal-noise photons per relevant mode
  double dark = 0.0;   ///< dark counts per detector per exposure (SPADE only)

  double signal() const noexcept { return eta * n_s; }

  /// eta * n_s / n_n; empty when there is no thermal noise.
  std::optional<double> snr() const noexcept;

  /// Throws ValidationError unless every field is finite and in range.
  /// `require_positive_s` rejects s == 0.
  void validate(bool require_positive_s = false) const;

  /// Copy with eta * n_s set to `signal`, holding eta fixed.
  SceneParams with_signal(double signal) const;
};

}  // namespace superres
