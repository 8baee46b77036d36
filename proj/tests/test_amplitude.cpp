#include <doctest.h>

#include <cmath>

#include "hg/amplitude.hpp"

using namespace hg;

namespace {

MediumModel homog(double c = 1500.0) {
  return make_homogeneous_medium({201, 201, 0.2e-3, 0.2e-3, {-20e-3, -20e-3}}, c);
}

MediumModel lens_medium(double contrast) {
  return make_lens_medium({401, 401, 0.1e-3, 0.1e-3, {-20e-3, -20e-3}}, contrast);
}

struct TracedRay {
  RayTrajectory ray;
  double deltaX;
};

TracedRay homog_ray(const MediumModel& m, double deltaX, double T = 10e-6, double dt = 50e-9) {
  const Vec2 spawn{deltaX, 0.0};
  const double eta = 1.0 / m.cMax;
  RayTrajectory ray = trace_ray(m, spawn, {eta, 0}, dt, T);
  ray.shootingPoint = {0, 0};
  ray.deltaX = deltaX;
  return {ray, deltaX};
}

}  // namespace

TEST_CASE("ODE Jacobian: homogeneous spherical spreading q = (dX + ct)/dX") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX);
  const RayDensity d = jacobian_ode(m, tr.ray, dX);
  REQUIRE(d.size() == tr.ray.size());
  for (int j = 0; j < d.size(); ++j) {
    const double t = j * tr.ray.dt;
    CHECK(d.q[j] == doctest::Approx((dX + 1500.0 * t) / dX).epsilon(1e-9));
    CHECK(d.maslov[j] == 0);
  }
}

TEST_CASE("proximal Jacobian agrees with the ODE route in a homogeneous medium") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX);
  const RayDensity ode = jacobian_ode(m, tr.ray, dX);
  const RayDensity prox = jacobian_proximal(m, tr.ray, 2.0 * M_PI / 2000.0, dX);
  const int n = std::min(ode.size(), prox.size());
  REQUIRE(n > 100);
  for (int j = 1; j < n; ++j) {
    const double ratioOde = ode.q[j] / ode.q[0];
    const double ratioProx = prox.q[j] / prox.q[0];
    CHECK(ratioProx == doctest::Approx(ratioOde).epsilon(5e-3));
  }
}

TEST_CASE("proximal q is first-order independent of the angle increment") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX);
  const RayDensity a = jacobian_proximal(m, tr.ray, 3.2e-3, dX);
  const RayDensity b = jacobian_proximal(m, tr.ray, 1.6e-3, dX);
  const int n = std::min(a.size(), b.size());
  for (int j = 1; j < n; j += 7) {
    const double ratio = (a.q[j] / a.q[0]) / (b.q[j] / b.q[0]);
    CHECK(ratio > 0.99);
    CHECK(ratio < 1.01);
  }
}

TEST_CASE("amplitude from the proximal q decays as sqrt(dX / (dX + r))") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX);
  const RayDensity d = jacobian_proximal(m, tr.ray, 3.1e-3, dX);
  const auto A = amplitude_along(tr.ray, d, m, 1.0);
  for (int j = 0; j < static_cast<int>(A.size()); j += 11) {
    const double r = 1500.0 * j * tr.ray.dt;
    CHECK(std::abs(A[j]) == doctest::Approx(std::sqrt(dX / (dX + r))).epsilon(2e-3));
    CHECK(A[j].imag() == 0.0);
  }
}

TEST_CASE("lens cone develops caustics: sign changes and Maslov counts") {
  const MediumModel m = lens_medium(0.2);
  const Vec2 sensor{-19.5e-3, 0.0};
  const double dX = 0.1e-3;
  const RayCone cone = shoot_cone(m, sensor, 720, 5e-8, 30e-6, dX, -0.3, 0.6);
  int raysWithCaustic = 0;
  for (const RayTrajectory& ray : cone.rays) {
    if (ray.size() < 10) continue;
    const RayDensity d = jacobian_ode(m, ray, dX);
    bool flipped = false;
    for (int j = 1; j < d.size(); ++j)
      if (d.q[j] * d.q[j - 1] < 0.0) flipped = true;
    if (flipped) {
      ++raysWithCaustic;
      CHECK(d.maslov.back() >= 1);
    }
  }
  CHECK(raysWithCaustic > 10);
}

TEST_CASE("ODE vs proximal q on a smooth heterogeneous medium within 2 percent") {
  const MediumModel m = lens_medium(0.05);
  const Vec2 sensor{-19.5e-3, 0.0};
  const double dX = 0.1e-3;
  const RayCone cone = shoot_cone(m, sensor, 64, 5e-8, 24e-6, dX, -0.5, 1.0);
  int checked = 0;
  for (const RayTrajectory& ray : cone.rays) {
    if (ray.size() < 100) continue;
    const RayDensity ode = jacobian_ode(m, ray, dX);
    const RayDensity prox = jacobian_proximal(m, ray, cone.deltaTheta, dX);
    const int n = std::min(ode.size(), prox.size());
    bool caustic = false;
    for (int j = 0; j < n; ++j)
      if (ode.q[j] <= 0.0 || prox.q[j] <= 0.0) caustic = true;
    if (caustic) continue;
    for (int j = 1; j < n; ++j) {
      const double a = ode.q[j] / ode.q[0];
      const double b = prox.q[j] / prox.q[0];
      CHECK(std::abs(a - b) / std::abs(a) < 0.02);
    }
    ++checked;
  }
  CHECK(checked >= 32);
}

TEST_CASE("amplitude identity cases") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX, 5e-6);
  SUBCASE("constant q, constant eta: amplitude stays A0") {
    RayDensity d;
    d.q.assign(tr.ray.samples.size(), 2.5);
    d.maslov.assign(tr.ray.samples.size(), 0);
    const auto A = amplitude_along(tr.ray, d, m, 0.7);
    for (const auto& a : A) CHECK(a.real() == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("analytic homogeneous amplitude") {
    const RayDensity d = jacobian_ode(m, tr.ray, dX);
    const auto A = amplitude_along(tr.ray, d, m, 1.0);
    for (int j = 0; j < static_cast<int>(A.size()); ++j) {
      const double t = j * tr.ray.dt;
      CHECK(A[j].real() == doctest::Approx(std::sqrt(dX / (dX + 1500.0 * t))).epsilon(1e-9));
    }
  }
  SUBCASE("one caustic crossing multiplies by -i") {
    RayDensity d;
    const int n = tr.ray.size();
    d.q.assign(n, 1.0);
    for (int j = n / 2; j < n; ++j) d.q[j] = -1.0;
    d.maslov.assign(n, 0);
    for (int j = n / 2; j < n; ++j) d.maslov[j] = 1;
    const auto A = amplitude_along(tr.ray, d, m, 1.0);
    CHECK(A[n - 1].real() == doctest::Approx(0.0));
    CHECK(A[n - 1].imag() == doctest::Approx(-1.0));
  }
  SUBCASE("q = 0 samples are masked as non-finite") {
    RayDensity d;
    const int n = tr.ray.size();
    d.q.assign(n, 1.0);
    d.q[3] = 0.0;
    d.maslov.assign(n, 0);
    const auto A = amplitude_along(tr.ray, d, m, 1.0);
    CHECK(!std::isfinite(A[3].real()));
    CHECK(std::isfinite(A[2].real()));
  }
}

TEST_CASE("reversed density identities") {
  const MediumModel m = lens_medium(0.05);
  const Vec2 x0{-19e-3, 1e-3};
  const double eta0 = slowness_and_gradient(m, x0).eta;
  RayTrajectory ray = trace_ray(m, x0, {eta0, 0}, 5e-8, 20e-6);
  ray.shootingPoint = x0 - 0.1e-3 * Vec2{1, 0};
  const RayDensity d = jacobian_ode(m, ray, 0.1e-3);
  const RayDensity r = reversed_density(d);
  const int N = d.size() - 1;
  CHECK(r.q[0] == 1.0);
  CHECK(r.q[N] == doctest::Approx(d.q[0] / d.q[N]).epsilon(1e-14));
  // q_R(t) q(T) = q(T - t) to one rounding.
  for (int j = 0; j <= N; ++j) {
    const double lhs = r.q[j] * d.q[N];
    const double rhs = d.q[N - j];
    CHECK(std::abs(lhs - rhs) <= 2.0 * std::abs(rhs) * 1e-16 + 1e-300);
  }
  // Double reversal returns the original up to the overall scale q(T).
  const RayDensity rr = reversed_density(r);
  for (int j = 0; j <= N; ++j)
    CHECK(rr.q[j] == doctest::Approx(d.q[j] / d.q[0]).epsilon(1e-12));
}

TEST_CASE("reversed density rejects a caustic endpoint") {
  RayDensity d;
  d.q = {1.0, 0.5, 0.0};
  d.maslov = {0, 0, 0};
  CHECK_THROWS_AS(reversed_density(d), std::domain_error);
}

TEST_CASE("attenuation profile and its reverse are reciprocal") {
  const MediumModel m = lens_medium(0.1);
  const Vec2 x0{-19e-3, 0.5e-3};
  const double eta0 = slowness_and_gradient(m, x0).eta;
  RayTrajectory ray = trace_ray(m, x0, {eta0, 0}, 5e-8, 20e-6);
  const RayDensity d = jacobian_ode(m, ray, 0.1e-3);
  const AttenuationProfile a = attenuations(ray, d, m);
  CHECK(a.mu[0] == doctest::Approx(1.0));
  for (std::size_t j = 0; j < a.mu.size(); ++j)
    if (std::isfinite(a.mu[j]) && std::isfinite(a.muR[j]))
      CHECK(std::abs(a.mu[j] * a.muR[j] - 1.0) < 1e-12);
}

TEST_CASE("homogeneous attenuations are the analytic spreading factors") {
  const MediumModel m = homog();
  const double dX = 0.2e-3;
  const auto tr = homog_ray(m, dX, 6e-6);
  const RayDensity d = jacobian_ode(m, tr.ray, dX);
  const AttenuationProfile a = attenuations(tr.ray, d, m);
  for (int j = 0; j < static_cast<int>(a.mu.size()); j += 13) {
    const double ct = 1500.0 * j * tr.ray.dt;
    CHECK(a.mu[j] == doctest::Approx(std::sqrt(dX / (dX + ct))).epsilon(1e-9));
    CHECK(a.muR[j] == doctest::Approx(std::sqrt((dX + ct) / dX)).epsilon(1e-9));
  }
}
