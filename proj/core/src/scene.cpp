#include "superres/scene.hpp"

#include <cmath>
#include <string>

#include "superres/error.hpp"

namespace superres {

std::optional<double> SceneParams::snr() const noexcept {
  if (!(n_n > 0.0)) return std::nullopt;
  return signal() / n_n;
}

void SceneParams::validate(bool require_positive_s) const {
  auto check = [](bool ok, const char* msg) {
    if (!ok) throw ValidationError(msg);
  };
  check(std::isfinite(s) && s >= 0.0, "separation s must be finite and >= 0");
  if (require_positive_s) check(s > 0.0, "separation s must be > 0");
  check(std::isfinite(sigma) && sigma > 0.0, "sigma must be finite and > 0");
  check(std::isfinite(eta) && eta > 0.0 && eta <= 0.5, "eta must lie in (0, 1/2]");
  check(std::isfinite(n_s) && n_s >= 0.0, "n_s must be finite and >= 0");
  check(std::isfinite(n_n) && n_n >= 0.0, "n_n must be finite and >= 0");
  check(std::isfinite(dark) && dark >= 0.0, "dark must be finite and >= 0");
}

SceneParams SceneParams::with_signal(double signal) const {
  SceneParams out = *this;
  out.n_s = signal / eta;
  return out;
}

}  // namespace superres
