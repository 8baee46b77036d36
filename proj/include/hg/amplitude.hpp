#pragma once

#include <complex>
#include <vector>

#include "hg/medium.hpp"
#include "hg/ray.hpp"

namespace hg {

enum class JacobianMethod { ode, proximal };

/// Signed relative Jacobian determinant q along a ray plus the running
/// Keller-Maslov count of its sign changes. q[0] > 0 by construction.
struct RayDensity {
  std::vector<double> q;
  std::vector<int> maslov;
  JacobianMethod method = JacobianMethod::ode;

  int size() const { return static_cast<int>(q.size()); }
};

/// mu[j] = (eta(x_0) / eta(x_j)) * sqrt(q0 / q_j) magnitudes, and the
/// reversed factor muR = 1/mu, elementwise.
struct AttenuationProfile {
  std::vector<double> mu;
  std::vector<double> muR;
};

/// Integrates the 4x4 variational system of the ray flow with RK2 along the
/// ray, initial data grad_x0 x = I and grad_x0 p = the spherical-wavefront
/// Hessian at distance deltaX from the shooting point; q_j = det(grad_x0 x).
RayDensity jacobian_ode(const MediumModel& medium, const RayTrajectory& ray, double deltaX);

/// Finite-difference q from one auxiliary ray rotated by deltaTheta about
/// the shooting point: q_j = det[(x_aux,j - x_j)/dTheta, (x_{j+1} - x_j)/dt].
/// Truncated to the shorter of the two rays.
RayDensity jacobian_proximal(const MediumModel& medium, const RayTrajectory& ray,
                             double deltaTheta, double deltaX);

/// A_j = A0 * (eta(x_0)/eta(x_j)) * sqrt|q0/q_j| * exp(-i m_j pi/2).
/// Samples with q_j == 0 come back as quiet NaN and are skipped downstream.
std::vector<std::complex<double>> amplitude_along(const RayTrajectory& ray,
                                                  const RayDensity& density,
                                                  const MediumModel& medium, double A0);

/// q_R[j] = q[N-j] / q[N]; Maslov counts recomputed from the reversed signs.
/// Throws std::domain_error when q[N] == 0 (caustic endpoint).
RayDensity reversed_density(const RayDensity& density);

AttenuationProfile attenuations(const RayTrajectory& ray, const RayDensity& density,
                                const MediumModel& medium);

}  // namespace hg
