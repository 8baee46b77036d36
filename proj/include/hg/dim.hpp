#pragma once

#include <optional>
#include <vector>

#include "hg/medium.hpp"
#include "hg/ray.hpp"

namespace hg {

/// Trajectory from the discrete interface method: first-order stepping with
/// Snell refraction at each virtual interface, plus the spreading and
/// interface attenuations (nepers) and the cumulative arclength.
struct DimTrajectory {
  std::vector<PhasePoint> samples;
  std::vector<double> alphaS;      // spherical-spreading attenuation
  std::vector<double> alphaI;      // cumulative interface attenuation
  std::vector<double> arclength;   // L(t_j), meters
  double dt = 0.0;
  double deltaX = 0.0;
  bool totalInternalReflection = false;  // ray terminated at a TIR interface
  std::optional<int> exitedAt;

  int size() const { return static_cast<int>(samples.size()); }
};

/// x_j = x_{j-1} + p_{j-1}/eta^2 * dt with Snell's law across the virtual
/// interface normal to grad(eta) at x_j. |p_j| = eta(x_j) by construction.
DimTrajectory dim_trace(const MediumModel& medium, Vec2 x0, Vec2 p0, double dt, double T,
                        double deltaX);

/// A_j = A0 * exp(-(alphaS_j + alphaI_j)).
std::vector<double> dim_amplitude(const DimTrajectory& traj, double A0);

struct ReversedAlpha {
  std::vector<double> alphaR;
  /// Set when some reversed interface increment has exp(dAlpha) >= 2, where
  /// the reverse transmission is undefined.
  bool flagged = false;
};

/// alphaR(t) = 1/2 ln((L(T) - L(T-t) + dX)/dX) + sum ln(2 - exp(dAlphaI))
/// over the reversed per-step interface increments.
ReversedAlpha dim_reversed_alpha(const DimTrajectory& traj);

}  // namespace hg
