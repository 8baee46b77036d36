#include "hg/ray.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hg/threading.hpp"

namespace hg {

namespace {

struct Deriv {
  Vec2 dx;
  Vec2 dp;
};

// dx/dt = p/eta^2, dp/dt = grad(eta)/eta, coefficients at the nearest node.
inline std::optional<Deriv> time_rhs(const MediumModel& m, const PhasePoint& s) {
  const auto node = nearest_node(m.slowness.grid, s.x);
  if (!node) return std::nullopt;
  const SlownessSample sl = slowness_and_gradient_at(m, *node);
  return Deriv{s.p / (sl.eta * sl.eta), sl.grad / sl.eta};
}

inline std::optional<Deriv> tau_rhs(const MediumModel& m, const PhasePoint& s) {
  const auto node = nearest_node(m.slowness.grid, s.x);
  if (!node) return std::nullopt;
  const SlownessSample sl = slowness_and_gradient_at(m, *node);
  return Deriv{s.p, sl.eta * sl.grad};
}

inline bool inside(const SmoothMedium& m, Vec2 x) {
  return x.x >= m.boundsLo.x && x.x <= m.boundsHi.x && x.y >= m.boundsLo.y && x.y <= m.boundsHi.y;
}

inline std::optional<Deriv> time_rhs(const SmoothMedium& m, const PhasePoint& s) {
  if (!inside(m, s.x)) return std::nullopt;
  const double eta = m.eta(s.x);
  return Deriv{s.p / (eta * eta), m.etaGrad(s.x) / eta};
}

inline std::optional<double> eta_at(const MediumModel& m, Vec2 x) {
  const auto node = nearest_node(m.slowness.grid, x);
  if (!node) return std::nullopt;
  return m.slowness.values[node->idx];
}

inline std::optional<double> eta_at(const SmoothMedium& m, Vec2 x) {
  if (!inside(m, x)) return std::nullopt;
  return m.eta(x);
}

// Rescale p onto the eikonal sphere |p| = eta(x).
template <typename Med>
inline bool project(const Med& m, PhasePoint& s) {
  const auto eta = eta_at(m, s.x);
  if (!eta) return false;
  const double pn = norm(s.p);
  if (pn == 0.0) return false;
  s.p = (*eta / pn) * s.p;
  return true;
}

template <typename Med, typename Rhs>
RayTrajectory integrate(const Med& medium, Vec2 x0, Vec2 p0, double step, double span, Rhs rhs,
                        bool projectEikonal) {
  if (!(step > 0.0) || span < step) throw std::invalid_argument("trace_ray: need dt > 0 and T >= dt");
  RayTrajectory ray;
  ray.dt = step;
  ray.shootingPoint = x0;
  const int nSteps = static_cast<int>(std::llround(span / step));
  ray.samples.reserve(nSteps + 1);

  PhasePoint state{x0, p0};
  if (!eta_at(medium, x0)) {
    ray.samples.push_back(state);
    ray.exitedAt = 0;
    return ray;
  }
  if (projectEikonal) project(medium, state);
  ray.samples.push_back(state);

  for (int n = 0; n < nSteps; ++n) {
    const auto k1 = rhs(medium, state);
    if (!k1) { ray.exitedAt = ray.size(); break; }
    PhasePoint mid{state.x + 0.5 * step * k1->dx, state.p + 0.5 * step * k1->dp};
    const auto k2 = rhs(medium, mid);
    if (!k2) { ray.exitedAt = ray.size(); break; }
    PhasePoint next{state.x + step * k2->dx, state.p + step * k2->dp};
    if (!eta_at(medium, next.x)) { ray.exitedAt = ray.size(); break; }
    if (projectEikonal && !project(medium, next)) { ray.exitedAt = ray.size(); break; }
    state = next;
    ray.samples.push_back(state);
  }
  return ray;
}

}  // namespace

RayTrajectory trace_ray(const MediumModel& medium, Vec2 x0, Vec2 p0, double dt, double T) {
  return integrate(medium, x0, p0, dt, T,
                   [](const MediumModel& m, const PhasePoint& s) { return time_rhs(m, s); }, true);
}

RayTrajectory trace_ray(const SmoothMedium& medium, Vec2 x0, Vec2 p0, double dt, double T) {
  return integrate(medium, x0, p0, dt, T,
                   [](const SmoothMedium& m, const PhasePoint& s) { return time_rhs(m, s); }, true);
}

TauTrajectory trace_ray_tau(const MediumModel& medium, Vec2 x0, Vec2 p0, double dtau, double Tau) {
  TauTrajectory out;
  out.traj = integrate(medium, x0, p0, dtau, Tau,
                       [](const MediumModel& m, const PhasePoint& s) { return tau_rhs(m, s); }, true);
  out.timeOfFlight.resize(out.traj.samples.size());
  double t = 0.0;
  double prevEta2 = 0.0;
  for (int j = 0; j < out.traj.size(); ++j) {
    const auto node = nearest_node(medium.slowness.grid, out.traj.samples[j].x);
    const double eta = node ? medium.slowness.values[node->idx] : prevEta2;
    const double eta2 = eta * eta;
    if (j > 0) t += 0.5 * dtau * (prevEta2 + eta2);
    out.timeOfFlight[j] = t;
    prevEta2 = eta2;
  }
  return out;
}

RayCone shoot_cone(const MediumModel& medium, Vec2 x0, int nRays, double dt, double T,
                   double deltaX, double theta0, double thetaSpan, int threads) {
  if (nRays < 3) throw std::invalid_argument("shoot_cone: need nRays >= 3");
  if (!(deltaX > 0.0)) throw std::invalid_argument("shoot_cone: need deltaX > 0");
  RayCone cone;
  cone.sensor = x0;
  cone.dt = dt;
  cone.T = T;
  cone.deltaTheta = thetaSpan / nRays;
  cone.raySpawnOffset = deltaX;
  cone.rays.resize(nRays);
  parallel_for(static_cast<std::size_t>(nRays), threads, [&](std::size_t i) {
    const double theta = theta0 + cone.deltaTheta * static_cast<double>(i);
    const Vec2 dir{std::cos(theta), std::sin(theta)};
    const Vec2 spawn = x0 + deltaX * dir;
    double eta = 0.0;
    if (const auto node = nearest_node(medium.slowness.grid, spawn))
      eta = medium.slowness.values[node->idx];
    else if (const auto sensorNode = nearest_node(medium.slowness.grid, x0))
      eta = medium.slowness.values[sensorNode->idx];
    else
      eta = 1.0 / medium.cMax;
    RayTrajectory ray = trace_ray(medium, spawn, eta * dir, dt, T);
    ray.shootingPoint = x0;
    ray.theta = theta;
    ray.deltaX = deltaX;
    cone.rays[i] = std::move(ray);
  });
  return cone;
}

RayTrajectory reverse_ray(const RayTrajectory& ray) {
  if (ray.size() < 2) throw std::invalid_argument("reverse_ray: need at least 2 samples");
  RayTrajectory rev;
  rev.dt = ray.dt;
  rev.deltaX = ray.deltaX;
  rev.theta = ray.theta;
  rev.shootingPoint = ray.samples.back().x;
  rev.samples.resize(ray.samples.size());
  const int n = ray.size();
  for (int j = 0; j < n; ++j) {
    rev.samples[j].x = ray.samples[n - 1 - j].x;
    rev.samples[j].p = -1.0 * ray.samples[n - 1 - j].p;
  }
  return rev;
}

std::vector<double> phase_along(const RayTrajectory& ray, double phi0) {
  std::vector<double> phi(ray.samples.size());
  for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = phi0 + ray.dt * static_cast<double>(j);
  return phi;
}

}  // namespace hg
