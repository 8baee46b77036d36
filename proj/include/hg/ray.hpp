#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hg/geometry.hpp"
#include "hg/medium.hpp"

namespace hg {

/// Point in phase space: position x and slowness vector p. Along traced rays
/// |p| = eta(x) holds after projection (the eikonal constraint).
struct PhasePoint {
  Vec2 x;
  Vec2 p;
};

/// Equitemporal samples of one ray, t_j = j * dt. The trajectory starts at
/// the initial point, which sits a spawn offset deltaX down-ray from the
/// shooting point (the wave origin).
struct RayTrajectory {
  std::vector<PhasePoint> samples;
  double dt = 0.0;
  Vec2 shootingPoint;
  double theta = 0.0;
  double deltaX = 0.0;
  /// Index of the first out-of-domain sample. The sample itself is stored
  /// only when the start point is already outside (length-1 trajectory);
  /// otherwise integration stops and exitedAt == samples.size().
  std::optional<int> exitedAt;

  int size() const { return static_cast<int>(samples.size()); }
  bool exited() const { return exitedAt.has_value(); }
  Vec2 initialPoint() const { return samples.empty() ? shootingPoint : samples.front().x; }
};

/// All rays shot from one sensor; (l, theta) coordinates for the domain.
struct RayCone {
  Vec2 sensor;
  double dt = 0.0;
  double T = 0.0;
  double deltaTheta = 0.0;
  double raySpawnOffset = 0.0;
  std::vector<RayTrajectory> rays;
};

/// RK2 (midpoint) on dx/dt = p/eta^2, dp/dt = grad(eta)/eta. After every
/// step p is rescaled to |p| = eta(x); integration stops at t = T or at the
/// first domain exit. The caller provides |p0| = eta(x0).
RayTrajectory trace_ray(const MediumModel& medium, Vec2 x0, Vec2 p0, double dt, double T);

/// Analytically smooth coefficient field for integrator-order studies; the
/// grid-backed MediumModel is piecewise constant under nearest-neighbor
/// sampling, which hides the scheme's convergence order behind cell noise.
struct SmoothMedium {
  std::function<double(Vec2)> eta;
  std::function<Vec2(Vec2)> etaGrad;
  Vec2 boundsLo;
  Vec2 boundsHi;
};

/// Same integrator on smooth coefficients.
RayTrajectory trace_ray(const SmoothMedium& medium, Vec2 x0, Vec2 p0, double dt, double T);

struct TauTrajectory {
  RayTrajectory traj;                // samples at tau_j = j * dtau
  std::vector<double> timeOfFlight;  // t(tau_j), trapezoidal quadrature of eta^2
};

/// Same ray under the tau parametrization: dx/dtau = p, dp/dtau = eta*grad(eta),
/// with the propagation time recovered from dt = eta^2 dtau.
TauTrajectory trace_ray_tau(const MediumModel& medium, Vec2 x0, Vec2 p0, double dtau, double Tau);

/// Equiangular cone: theta_i = theta0 + i * span/nRays, each ray spawned at
/// x0 + deltaX * (cos, sin)(theta_i) with p0 = eta(spawn) * direction.
RayCone shoot_cone(const MediumModel& medium, Vec2 x0, int nRays, double dt, double T,
                   double deltaX, double theta0 = 0.0, double thetaSpan = 2.0 * M_PI,
                   int threads = 1);

/// x_R(t) = x(T - t), p_R(t) = -p(T - t); times re-indexed from 0.
RayTrajectory reverse_ray(const RayTrajectory& ray);

/// Phase is propagation time: phi_j = phi0 + t_j.
std::vector<double> phase_along(const RayTrajectory& ray, double phi0);

}  // namespace hg
