#include <doctest.h>

#include <cmath>

#include "hg/ray.hpp"

using namespace hg;

namespace {

MediumModel homog(double c = 1500.0) {
  return make_homogeneous_medium({201, 201, 0.2e-3, 0.2e-3, {-20e-3, -20e-3}}, c);
}

MediumModel fine_lens(double contrast) {
  // Fine grid keeps the nearest-neighbor coefficient jumps far below the
  // time-integration error in the convergence study.
  return make_lens_medium({513, 513, 0.08e-3, 0.08e-3, {-20.5e-3, -20.5e-3}}, contrast);
}

}  // namespace

TEST_CASE("straight ray in a homogeneous medium, exact positions") {
  const MediumModel m = homog();
  const double eta = 1.0 / 1500.0;
  const RayTrajectory ray = trace_ray(m, {0, 0}, {eta, 0}, 50e-9, 10e-6);
  REQUIRE(ray.size() > 100);
  for (int j = 0; j < ray.size(); ++j) {
    CHECK(ray.samples[j].x.x == doctest::Approx(1500.0 * j * 50e-9).epsilon(1e-12));
    CHECK(ray.samples[j].x.y == 0.0);
  }
}

TEST_CASE("eikonal projection holds at every sample") {
  const MediumModel m = fine_lens(0.2);
  const double eta0 = slowness_and_gradient(m, {-15e-3, 1e-3}).eta;
  const RayTrajectory ray = trace_ray(m, {-15e-3, 1e-3}, {eta0, 0}, 50e-9, 30e-6);
  REQUIRE(ray.size() > 50);
  for (const PhasePoint& s : ray.samples) {
    const double eta = slowness_and_gradient(m, s.x).eta;
    CHECK(std::abs(norm(s.p) - eta) / eta < 1e-10);
    const double H = norm(s.p) / eta;  // c |p|
    CHECK(std::abs(H - 1.0) < 1e-10);
  }
}

namespace {

// The lens profile as a smooth coefficient field. Grid-backed media are
// piecewise constant under nearest-neighbor sampling, which buries the
// integrator's order under cell-crossing noise; the order study needs the
// smooth field, the grid tracer is then cross-checked against it.
SmoothMedium smooth_lens(double contrast, double c0, Vec2 center, double sigma, Vec2 lo, Vec2 hi) {
  SmoothMedium m;
  m.boundsLo = lo;
  m.boundsHi = hi;
  m.eta = [=](Vec2 x) { return 1.0 / (c0 * (1.0 - contrast * std::exp(-norm2(x - center) / (sigma * sigma)))); };
  m.etaGrad = [=](Vec2 x) {
    const double g = std::exp(-norm2(x - center) / (sigma * sigma));
    const double c = c0 * (1.0 - contrast * g);
    const Vec2 gradC = (c0 * contrast * g * 2.0 / (sigma * sigma)) * (x - center);
    return (-1.0 / (c * c)) * gradC;
  };
  return m;
}

}  // namespace

TEST_CASE("RK2 convergence on the lens medium") {
  const Vec2 lo{-20.5e-3, -20.5e-3}, hi{20.5e-3, 20.5e-3};
  const Vec2 center{0, 0};
  const double sigma = 0.15 * 41e-3;  // same profile make_lens_medium grids
  const SmoothMedium smooth = smooth_lens(0.2, 1500.0, center, sigma, lo, hi);
  const Vec2 x0{-15e-3, 2.5e-3};
  const Vec2 p0{smooth.eta(x0), 0};
  const double T = 16e-6;
  auto endpoint = [&](double dt) {
    const RayTrajectory r = trace_ray(smooth, x0, p0, dt, T);
    REQUIRE(!r.exited());
    return r.samples.back().x;
  };
  SUBCASE("order two against a dt/16 reference") {
    const double dts[] = {T / 64.0, T / 128.0, T / 256.0};
    double prev = -1.0;
    for (double dt : dts) {
      const double e = norm(endpoint(dt) - endpoint(dt / 16.0));
      if (prev > 0.0) {
        const double ratio = prev / e;
        CHECK(std::log2(ratio) >= 1.9);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
      }
      prev = e;
    }
  }
  SUBCASE("grid-backed tracer follows the smooth path within a few cells") {
    const MediumModel gridded = fine_lens(0.2);
    const double dt = 50e-9;
    const RayTrajectory a = trace_ray(gridded, x0, {slowness_and_gradient(gridded, x0).eta, 0}, dt, T);
    const RayTrajectory b = trace_ray(smooth, x0, p0, dt, T);
    const int n = std::min(a.size(), b.size());
    REQUIRE(n > 100);
    CHECK(norm(a.samples[n - 1].x - b.samples[n - 1].x) < 3.0 * gridded.slowness.grid.dx);
  }
}

TEST_CASE("tau parametrization matches the t parametrization") {
  const MediumModel m = homog();
  const double eta = 1.0 / 1500.0;
  SUBCASE("homogeneous: x(tau) = x0 + p0 tau and t = eta^2 tau") {
    const double dtau = 1e-1, Tau = 2.0;
    const TauTrajectory tt = trace_ray_tau(m, {0, 0}, {eta, 0}, dtau, Tau);
    for (int j = 0; j < tt.traj.size(); ++j) {
      CHECK(tt.traj.samples[j].x.x == doctest::Approx(eta * j * dtau).epsilon(1e-12));
      CHECK(tt.timeOfFlight[j] == doctest::Approx(eta * eta * j * dtau).epsilon(1e-12));
    }
  }
  SUBCASE("time of flight is strictly increasing") {
    const MediumModel lens = fine_lens(0.2);
    const double eta0 = slowness_and_gradient(lens, {-15e-3, 1e-3}).eta;
    const TauTrajectory tt = trace_ray_tau(lens, {-15e-3, 1e-3}, {eta0, 0}, 2e-2, 30.0);
    for (std::size_t j = 1; j < tt.timeOfFlight.size(); ++j)
      CHECK(tt.timeOfFlight[j] > tt.timeOfFlight[j - 1]);
  }
  SUBCASE("lens medium: resampled tau trajectory tracks the t trajectory") {
    const MediumModel lens = fine_lens(0.2);
    const Vec2 x0{-15e-3, 1.5e-3};
    const double eta0 = slowness_and_gradient(lens, x0).eta;
    const double dt = 50e-9;
    const RayTrajectory rt = trace_ray(lens, x0, {eta0, 0}, dt, 16e-6);
    const TauTrajectory tt = trace_ray_tau(lens, x0, {eta0, 0}, dt / (eta0 * eta0), 16e-6 / (eta0 * eta0));
    const double tol = 2.0 * lens.cMax * dt;
    for (int j = 0; j < rt.size(); j += 16) {
      const double t = j * dt;
      // Locate the tau sample bracketing t and interpolate linearly.
      std::size_t k = 1;
      while (k < tt.timeOfFlight.size() && tt.timeOfFlight[k] < t) ++k;
      if (k >= tt.timeOfFlight.size()) break;
      const double f = (t - tt.timeOfFlight[k - 1]) / (tt.timeOfFlight[k] - tt.timeOfFlight[k - 1]);
      const Vec2 xTau = tt.traj.samples[k - 1].x + f * (tt.traj.samples[k].x - tt.traj.samples[k - 1].x);
      CHECK(norm(xTau - rt.samples[j].x) < tol);
    }
  }
}

TEST_CASE("shoot_cone geometry") {
  const MediumModel m = homog();
  const Vec2 sensor{0, 0};
  const RayCone cone = shoot_cone(m, sensor, 2000, 50e-9, 5e-6, 0.2e-3);
  CHECK(cone.deltaTheta == doctest::Approx(2.0 * M_PI / 2000.0));
  CHECK(cone.deltaTheta == doctest::Approx(3.1416e-3).epsilon(1e-4));
  // Isotime points lie on a circle of radius c l + deltaX around the sensor.
  const int j = 40;
  for (int r = 0; r < 2000; r += 97) {
    const RayTrajectory& ray = cone.rays[r];
    REQUIRE(ray.size() > j);
    const double dist = norm(ray.samples[j].x - sensor);
    CHECK(dist == doctest::Approx(1500.0 * j * 50e-9 + 0.2e-3).epsilon(1e-9));
  }
}

TEST_CASE("cone rays share dt and spawn offset, equiangular increments") {
  const MediumModel m = homog();
  const RayCone cone = shoot_cone(m, {0, 0}, 16, 1e-7, 2e-6, 0.2e-3);
  for (int i = 1; i < 16; ++i)
    CHECK(cone.rays[i].theta - cone.rays[i - 1].theta == doctest::Approx(cone.deltaTheta));
}

TEST_CASE("arclength step bound c_max dt") {
  const MediumModel m = fine_lens(0.3);
  const Vec2 x0{-15e-3, 1e-3};
  const double eta0 = slowness_and_gradient(m, x0).eta;
  const double dt = 1e-7;
  const RayTrajectory ray = trace_ray(m, x0, {eta0, 0}, dt, 20e-6);
  for (int j = 1; j < ray.size(); ++j)
    CHECK(norm(ray.samples[j].x - ray.samples[j - 1].x) <= m.cMax * dt * (1.0 + 1e-6));
}

TEST_CASE("reverse_ray is an involution with the endpoint map") {
  const MediumModel m = fine_lens(0.2);
  const Vec2 x0{-15e-3, 2e-3};
  const double eta0 = slowness_and_gradient(m, x0).eta;
  const RayTrajectory ray = trace_ray(m, x0, {eta0, 0}, 1e-7, 15e-6);
  const RayTrajectory rev = reverse_ray(ray);
  const int N = ray.size() - 1;
  CHECK(rev.samples[0].x.x == ray.samples[N].x.x);
  CHECK(rev.samples[N].x.x == ray.samples[0].x.x);
  CHECK(rev.samples[0].p.x == -ray.samples[N].p.x);
  const RayTrajectory twice = reverse_ray(rev);
  for (int j = 0; j <= N; ++j) {
    CHECK(twice.samples[j].x.x == ray.samples[j].x.x);
    CHECK(twice.samples[j].p.y == ray.samples[j].p.y);
  }
}

TEST_CASE("re-tracing a reversed ray returns to the start") {
  const MediumModel m = fine_lens(0.2);
  const Vec2 x0{-15e-3, 2e-3};
  const double eta0 = slowness_and_gradient(m, x0).eta;
  const double dt = 5e-8;
  const RayTrajectory ray = trace_ray(m, x0, {eta0, 0}, dt, 15e-6);
  REQUIRE(!ray.exited());
  const RayTrajectory rev = reverse_ray(ray);
  const double T = dt * (ray.size() - 1);
  const RayTrajectory back = trace_ray(m, rev.samples[0].x, rev.samples[0].p, dt, T);
  double closest = 1e300;
  for (const PhasePoint& s : back.samples) closest = std::min(closest, norm(s.x - x0));
  CHECK(closest <= 2.0 * m.cMax * dt);
}

TEST_CASE("phase along a ray is linear in time") {
  const MediumModel m = homog();
  const double eta = 1.0 / 1500.0;
  const double dt = 50e-9;
  const RayTrajectory ray = trace_ray(m, {0, 0}, {eta, 0}, dt, 5e-6);
  const auto phi = phase_along(ray, 0.0);
  for (std::size_t j = 0; j < phi.size(); ++j) CHECK(phi[j] == doctest::Approx(j * dt));
  for (std::size_t j = 1; j < phi.size(); ++j) CHECK(phi[j] - phi[j - 1] == doctest::Approx(dt));

  // Reversed phase: the pull-back of the forward phase through the reversal
  // map gives phi_R(t_j) = T - t_j + phi0, so phi_R(0) = T + phi0.
  const double phi0 = 1e-6;
  const auto phiFwd = phase_along(ray, phi0);
  const int N = ray.size() - 1;
  const double T = N * dt;
  auto phiRev = [&](int j) { return phiFwd[N - j]; };
  CHECK(phiRev(0) == doctest::Approx(T + phi0));
  for (int j = 0; j <= N; ++j) CHECK(phiRev(j) == doctest::Approx(T - j * dt + phi0));
}

TEST_CASE("out-of-bounds start yields a length-1 exited trajectory") {
  const MediumModel m = homog();
  const RayTrajectory ray = trace_ray(m, {1.0, 1.0}, {1e-3, 0}, 1e-7, 1e-6);
  CHECK(ray.size() == 1);
  REQUIRE(ray.exitedAt.has_value());
  CHECK(*ray.exitedAt == 0);
}
