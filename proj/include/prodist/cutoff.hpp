#pragma once

#include <cmath>

#include "prodist/error.hpp"
#include "prodist/numeric.hpp"

namespace prodist {

enum class CutoffKind { fejer };

// Fejer kernel psi(x) = (sin(pi s x) / (pi s x))^2 whose transform is the
// triangle (1/s) * max(0, 1 - |xi|/s), supported on [-s, s]. Both sides are
// nonnegative, psi(0) = 1 and the transform integrates to 1 for every s.
struct CutoffFunction {
  CutoffKind kind = CutoffKind::fejer;
  double scale = 1.0;

  void validate() const {
    if (kind != CutoffKind::fejer) throw ValidationError("cutoff: unsupported kind");
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw ValidationError("cutoff: scale must be positive and finite");
    }
  }

  double operator()(double x) const {
    const double z = kPi * scale * x;
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 3.0;
    const double s = std::sin(z) / z;
    return s * s;
  }

  double transform(double xi) const {
    const double a = std::abs(xi) / scale;
    return a >= 1.0 ? 0.0 : (1.0 - a) / scale;
  }

  // The transform vanishes outside [-support, support].
  double transform_support() const { return scale; }
};

}  // namespace prodist
