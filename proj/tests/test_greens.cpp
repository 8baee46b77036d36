#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <vector>

#include "hg/errors.hpp"
#include "hg/greens.hpp"

using namespace hg;

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Improper oscillatory integral of an even function: lobe-wise integration up
// to the range cap, then repeated averaging of the partial sums (the lobes
// alternate, so the averaged tail converges to the Abel limit).
double oscillation_aware_integral(const std::function<double(double)>& f, double lobeWidth,
                                  double cap) {
  std::vector<double> partial;
  double acc = 0.0;
  for (double a = 0.0; a + lobeWidth <= cap; a += lobeWidth) {
    acc += simpson(f, a, a + lobeWidth, 32);
    partial.push_back(acc);
  }
  const std::size_t keep = std::min<std::size_t>(partial.size(), 48);
  std::vector<double> tri(partial.end() - keep, partial.end());
  while (tri.size() > 1) {
    for (std::size_t i = 0; i + 1 < tri.size(); ++i) tri[i] = 0.5 * (tri[i] + tri[i + 1]);
    tri.pop_back();
  }
  return 2.0 * tri[0];  // even function
}

}  // namespace

TEST_CASE("delta representations at t = 0") {
  const double eps = 3e-7;
  const DeltaRep gauss{DeltaKind::gaussian, eps};
  CHECK(delta_rep(gauss, 0.0).value == doctest::Approx(1.0 / (eps * std::sqrt(kPi))));
  CHECK(delta_rep(gauss, 0.0).derivative == 0.0);
  const DeltaRep diri{DeltaKind::dirichlet, eps};
  CHECK(delta_rep(diri, 0.0).value == doctest::Approx(1.0 / (kPi * eps)));
  CHECK(delta_rep(diri, 0.0).derivative == 0.0);
}

TEST_CASE("delta representations integrate to one") {
  const double eps = 2e-7;
  SUBCASE("gaussian over 10 eps") {
    const DeltaRep rep{DeltaKind::gaussian, eps};
    const double integral =
        simpson([&](double t) { return delta_rep(rep, t).value; }, -10 * eps, 10 * eps, 4096);
    CHECK(std::abs(integral - 1.0) < 1e-6);
  }
  SUBCASE("dirichlet over 1000 eps, oscillation-aware") {
    const DeltaRep rep{DeltaKind::dirichlet, eps};
    const double integral = oscillation_aware_integral(
        [&](double t) { return delta_rep(rep, t).value; }, kPi * eps, 1000.0 * eps);
    CHECK(std::abs(integral - 1.0) < 1e-6);
  }
}

TEST_CASE("delta derivative is odd") {
  const double eps = 1e-7;
  for (DeltaKind kind : {DeltaKind::gaussian, DeltaKind::dirichlet}) {
    const DeltaRep rep{kind, eps};
    for (double t : {0.3 * eps, 1.7 * eps, 4.0 * eps})
      CHECK(delta_rep(rep, -t).derivative == doctest::Approx(-delta_rep(rep, t).derivative));
  }
}

TEST_CASE("gaussian is non-negative, dirichlet oscillates") {
  const double eps = 1e-7;
  const DeltaRep gauss{DeltaKind::gaussian, eps};
  const DeltaRep diri{DeltaKind::dirichlet, eps};
  bool sawNegative = false;
  for (int k = -600; k <= 600; ++k) {
    const double t = 0.1 * k * eps;
    CHECK(delta_rep(gauss, t).value >= 0.0);
    if (delta_rep(diri, t).value < 0.0) sawNegative = true;
  }
  CHECK(sawNegative);
}

TEST_CASE("2D Green's function: direct substitution far from the front") {
  const DeltaRep rep{DeltaKind::gaussian, 1e-3};
  const double v = g0_2d(1.0, 2.0, 1.0, rep);
  CHECK(v == doctest::Approx((1.0 / (2.0 * kPi)) / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("2D Green's function: causal zero ahead of the front") {
  const DeltaRep rep{DeltaKind::gaussian, 1e-7};
  CHECK(g0_2d(1500.0, 1e-6, 10e-3, rep) == 0.0);  // ct = 1.5 mm << r
  CHECK(g0_2d(1.0, 0.5, 1.0, rep) == 0.0);
}

TEST_CASE("2D Green's function tail approaches c/(2 pi c t)") {
  const DeltaRep rep{DeltaKind::gaussian, 1e-7};
  const double c = 1500.0, r = 1e-3;
  const double t = 100.0 * r / c;
  const double tail = c / (2.0 * kPi * c * t);
  CHECK(std::abs(g0_2d(c, t, r, rep) - tail) / tail < 0.02);
}

TEST_CASE("mollified 2D Green's integral matches the exact quadrature") {
  const double c = 1.0, r = 1.0, eps = 1e-7;
  const DeltaRep rep{DeltaKind::gaussian, eps};
  // Exact: int_{r/c}^{10 r/c} (c/2pi)/sqrt(c^2 t^2 - r^2) dt = acosh(10)/(2 pi).
  const double exact = std::acosh(10.0) / (2.0 * kPi);
  // Mollified, over its full support: the spike region finely, the 1/sqrt
  // decay beyond it under the substitution t = r/c + u^2.
  const double a = r / c - 6.0 * eps;
  const double seam = r / c + 20.0 * eps;
  const double spike = simpson([&](double t) { return g0_2d(c, t, r, rep); }, a, seam, 20000);
  const double body =
      simpson([&](double u) { return 2.0 * u * g0_2d(c, r / c + u * u, r, rep); },
              std::sqrt(20.0 * eps), std::sqrt(9.0 * r / c), 40000);
  CHECK(std::abs(spike + body - exact) / exact < 1e-6);
}

TEST_CASE("3D Green's function evaluation") {
  const double eps = 2e-7, c = 1500.0, r = 12.8e-3;
  const DeltaRep rep{DeltaKind::gaussian, eps};
  SUBCASE("peak at t = r/c") {
    CHECK(g0_3d(c, r / c, r, rep) ==
          doctest::Approx(c / (eps * std::sqrt(kPi) * 4.0 * kPi * r)).epsilon(1e-12));
  }
  SUBCASE("localized around the front") {
    CHECK(std::abs(g0_3d(c, r / c + 50.0 * eps, r, rep)) < 1e-12 * g0_3d(c, r / c, r, rep));
  }
  SUBCASE("time integral is 1/(4 pi r)") {
    // rep(c t - r) is localized where |c t - r| is within ~10 eps.
    const double integral = simpson([&](double t) { return g0_3d(c, t, r, rep); },
                                    (r - 10.0 * eps) / c, (r + 10.0 * eps) / c, 8192);
    const double expected = 1.0 / (4.0 * kPi * r);
    CHECK(std::abs(integral - expected) / expected < 1e-8);
  }
  SUBCASE("r = 0 is an error") { CHECK_THROWS_AS(g0_3d(c, 1e-6, 0.0, rep), std::domain_error); }
}

TEST_CASE("kernel table: ladder count, alignment, causality") {
  const double dt = 50e-9;
  const DeltaRep rep{DeltaKind::gaussian, 2.0 * dt};
  const GreensTable table = build_g0_table(1350.0, 1650.0, 10.0, dt, 256, rep);
  CHECK(table.rungCount() == 31);
  CHECK(table.preroll == 10);  // ceil(5 eps / dt)

  for (int rIdx = 0; rIdx < table.rungCount(); rIdx += 6) {
    const auto& k = table.series[rIdx];
    // Peak sits exactly at t = 0, i.e. stored index preroll.
    int peak = 0;
    for (int i = 1; i < static_cast<int>(k.size()); ++i)
      if (std::abs(k[i]) > std::abs(k[peak])) peak = i;
    CHECK(peak == table.preroll);
    // Nothing ahead of the causal floor.
    CHECK(k[0] == 0.0);
  }
}

TEST_CASE("front profile vanishes ahead of the causal floor") {
  const DeltaRep rep{DeltaKind::gaussian, 1e-7};
  const double scale = std::abs(front_profile_dt(0.0, rep));
  for (double s : {-5.5e-7, -6.0e-7, -8.0e-7})
    CHECK(std::abs(front_profile_dt(s, rep)) < 1e-9 * scale);
}

TEST_CASE("kernel lookup: nearest rung, tie to lower, clamp warnings") {
  const GreensTable table = build_g0_table(1350.0, 1650.0, 10.0, 50e-9, 64,
                                           {DeltaKind::gaussian, 1e-7});
  CHECK(lookup_g0_index(table, 1504.0) == 15);  // rung 1500
  CHECK(lookup_g0_index(table, 1505.0) == 15);  // tie resolves down
  CHECK(lookup_g0_index(table, 1506.0) == 16);
  CHECK(table.clampWarnings() == 0);
  CHECK(lookup_g0_index(table, 1000.0) == 0);
  CHECK(lookup_g0_index(table, 2000.0) == 30);
  CHECK(table.clampWarnings() == 2);
}

TEST_CASE("nearest-rung kernel is within 1 percent L2 of the exact-speed kernel") {
  const double dt = 50e-9;
  const DeltaRep rep{DeltaKind::gaussian, 2.0 * dt};
  const GreensTable ladder = build_g0_table(1350.0, 1650.0, 10.0, dt, 128, rep);
  const double c = 1504.7;
  const GreensTable exact = build_g0_table(c, c, 1.0, dt, 128, rep);
  const auto& approx = lookup_g0(ladder, c);
  const auto& truth = exact.series[0];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (approx[i] - truth[i]) * (approx[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  CHECK(std::sqrt(num / den) < 0.01);
}

TEST_CASE("HGT1 round trip") {
  const GreensTable table = build_g0_table(1400.0, 1600.0, 25.0, 50e-9, 96,
                                           {DeltaKind::dirichlet, 1.1e-7});
  const auto path = std::filesystem::temp_directory_path() / "hg_table_roundtrip.hgt";
  write_table(path.string(), table);
  const GreensTable back = read_table(path.string());
  CHECK(back.rungCount() == table.rungCount());
  CHECK(back.nt == table.nt);
  CHECK(back.preroll == table.preroll);
  CHECK(back.timeZero == table.timeZero);
  CHECK(back.cMin == table.cMin);
  CHECK(back.deltaC == table.deltaC);
  CHECK(back.rep.kind == table.rep.kind);
  for (int rIdx = 0; rIdx < table.rungCount(); ++rIdx) CHECK(back.series[rIdx] == table.series[rIdx]);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(build_g0_table(1650.0, 1350.0, 10.0, 50e-9, 64, {DeltaKind::gaussian, 1e-7}),
                  std::invalid_argument);
}
