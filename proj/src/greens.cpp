#include "hg/greens.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hg/errors.hpp"

namespace hg {

namespace {

constexpr double kPi = std::numbers::pi;

// Effective one-sided support of the representation, in units of eps.
double support_radius(DeltaKind kind) { return kind == DeltaKind::gaussian ? 7.0 : 60.0; }

double adaptive_simpson_impl(const std::function<double(double)>& f, double a, double b, double fa,
                             double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 40) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Integration window in w for integrands localized at s - w^2 within the
// representation support. Returns false when the window is empty.
bool w_window(double s, const DeltaRep& rep, double& w0, double& w1) {
  const double rad = support_radius(rep.kind) * rep.eps;
  if (s + rad <= 0.0) return false;
  w1 = std::sqrt(s + rad);
  w0 = (s - rad > 0.0) ? std::sqrt(s - rad) : 0.0;
  return true;
}

}  // namespace

DeltaValue delta_rep(const DeltaRep& rep, double t) {
  if (!(rep.eps > 0.0)) throw std::invalid_argument("delta_rep: eps must be > 0");
  const double e = rep.eps;
  if (rep.kind == DeltaKind::gaussian) {
    const double u = t / e;
    const double g = std::exp(-u * u) / (e * std::sqrt(kPi));
    return {g, -2.0 * t / (e * e) * g};
  }
  const double u = t / e;
  if (std::abs(u) < 1e-6) {
    // Series limits of sin(u)/(pi e u) and its derivative at u -> 0.
    return {(1.0 - u * u / 6.0) / (kPi * e), -t / (3.0 * kPi * e * e * e)};
  }
  const double value = std::sin(u) / (kPi * t);
  const double derivative = (t * std::cos(u) - e * std::sin(u)) / (e * kPi * t * t);
  return {value, derivative};
}

double front_profile(double s, const DeltaRep& rep) {
  double w0, w1;
  if (!w_window(s, rep, w0, w1)) return 0.0;
  const double scale = delta_rep(rep, 0.0).value;  // ~ 1/(eps sqrt(pi))
  const double tol = 1e-10 * scale * std::sqrt(rep.eps);
  return 2.0 * adaptive_simpson([&](double w) { return delta_rep(rep, s - w * w).value; }, w0, w1, tol);
}

double front_profile_dt(double s, const DeltaRep& rep) {
  double w0, w1;
  if (!w_window(s, rep, w0, w1)) return 0.0;
  const double scale = delta_rep(rep, 0.0).value / rep.eps;
  const double tol = 1e-10 * scale * std::sqrt(rep.eps);
  return 2.0 * adaptive_simpson([&](double w) { return delta_rep(rep, s - w * w).derivative; }, w0, w1, tol);
}

namespace {

// Shared shape of the two mollified evaluations: the exact formula away from
// the front, the w-substituted quadrature across it, zero ahead of it.
// repScale is the peak magnitude of repPart, used for the quadrature tolerance.
template <typename Exact, typename RepPart>
double mollified_g0(double c, double t, double r, const DeltaRep& rep, Exact exact, RepPart repPart,
                    double repScale) {
  if (t < 0.0 || r < 0.0) throw std::invalid_argument("g0_2d: need t, r >= 0");
  if (!(rep.eps > 0.0)) throw std::invalid_argument("g0_2d: eps must be > 0");
  const double s = t - r / c;
  const double farEdge = 10.0 * rep.eps;
  if (s > farEdge) return exact(s);
  if (s < -6.0 * rep.eps) return 0.0;
  if (r == 0.0) return s > 0.0 ? exact(s) : 0.0;  // r=0 front is genuinely singular
  double w0, w1;
  if (!w_window(s, rep, w0, w1)) return 0.0;
  const double tol = 1e-10 * repScale * std::sqrt(rep.eps) / std::sqrt(2.0 * r);
  return (std::sqrt(c) / kPi) *
         adaptive_simpson([&](double w) { return repPart(s - w * w) / std::sqrt(c * w * w + 2.0 * r); },
                          w0, w1, tol);
}

}  // namespace

double g0_2d(double c, double t, double r, const DeltaRep& rep) {
  return mollified_g0(
      c, t, r, rep,
      [&](double) { return (c / (2.0 * kPi)) / std::sqrt(c * c * t * t - r * r); },
      [&](double v) { return delta_rep(rep, v).value; }, 1.0 / (rep.eps * std::sqrt(kPi)));
}

double g0_2d_dt(double c, double t, double r, const DeltaRep& rep) {
  return mollified_g0(
      c, t, r, rep,
      [&](double) {
        const double q = c * c * t * t - r * r;
        return -(c / (2.0 * kPi)) * c * c * t / (q * std::sqrt(q));
      },
      [&](double v) { return delta_rep(rep, v).derivative; },
      1.0 / (rep.eps * rep.eps * std::sqrt(kPi)));
}

double g0_3d(double c, double t, double r, const DeltaRep& rep) {
  if (r <= 0.0) throw std::domain_error("g0_3d: singular at r == 0");
  return c * delta_rep(rep, c * t - r).value / (4.0 * kPi * r);
}

namespace {

// Rung amplitude: with the forward assembly scale sqrt(deltaX) * eta(x0),
// this normalization makes the homogeneous-medium series equal the direct
// quadrature of the free-space Green's formula.
double rung_amplitude(double c) { return std::pow(c, 1.5) / (2.0 * std::sqrt(2.0) * kPi); }

// Peak location of |front_profile_dt| by scan plus parabolic refinement.
double locate_peak(const DeltaRep& rep) {
  const double lo = -5.0 * rep.eps, hi = 6.0 * rep.eps;
  const int n = 2816;
  double bestS = 0.0, bestV = -1.0;
  double prev = 0.0, cur = 0.0, next = 0.0;
  int bestI = -1;
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = lo + (hi - lo) * i / n;
    vals[i] = std::abs(front_profile_dt(s, rep));
    if (vals[i] > bestV) { bestV = vals[i]; bestS = s; bestI = i; }
  }
  if (bestI > 0 && bestI < n) {
    prev = vals[bestI - 1]; cur = vals[bestI]; next = vals[bestI + 1];
    const double denom = prev - 2.0 * cur + next;
    if (denom < 0.0) {
      const double h = (hi - lo) / n;
      bestS += 0.5 * h * (prev - next) / denom;
    }
  }
  return bestS;
}

}  // namespace

GreensTable build_g0_table(double cMin, double cMax, double deltaC, double dt, int nt,
                           const DeltaRep& rep) {
  if (cMax < cMin) throw std::invalid_argument("build_g0_table: cMax < cMin");
  if (!(deltaC > 0.0) || !(dt > 0.0) || nt < 1) throw std::invalid_argument("build_g0_table: bad arguments");
  GreensTable table;
  table.cMin = cMin;
  table.deltaC = deltaC;
  table.dt = dt;
  table.nt = nt;
  table.rep = rep;
  table.preroll = static_cast<int>(std::ceil(5.0 * rep.eps / dt - 1e-12));

  const int I = static_cast<int>(std::ceil((cMax - cMin) / deltaC - 1e-12));
  const int rungs = std::max(I, 0) + 1;

  // The time profile is speed independent; rungs differ by a scalar. The
  // samples live on the exact dt grid; shifting the index origin by the
  // rounded peak location puts the maximum at the preroll index (t = 0 up to
  // half a sample) without disturbing the time base.
  const double sPeak = locate_peak(rep);
  table.timeZero = table.preroll - static_cast<int>(std::llround(sPeak / dt));
  std::vector<double> profile(nt);
  const double floor = -5.0 * rep.eps;
  for (int i = 0; i < nt; ++i) {
    const double s = (i - table.timeZero) * dt;
    profile[i] = (s < floor) ? 0.0 : front_profile_dt(s, rep);
  }

  table.series.resize(rungs);
  for (int rIdx = 0; rIdx < rungs; ++rIdx) {
    const double amp = rung_amplitude(table.cValue(rIdx));
    table.series[rIdx].resize(nt);
    for (int i = 0; i < nt; ++i) table.series[rIdx][i] = amp * profile[i];
  }
  return table;
}

int lookup_g0_index(const GreensTable& table, double c) {
  const int last = table.rungCount() - 1;
  const double u = (c - table.cMin) / table.deltaC;
  int i = static_cast<int>(std::ceil(u - 0.5));  // ties resolve to the lower rung
  if (i < 0 || i > last) {
    if (table.clampCount_) table.clampCount_->fetch_add(1, std::memory_order_relaxed);
    i = std::clamp(i, 0, last);
  }
  return i;
}

const std::vector<double>& lookup_g0(const GreensTable& table, double c) {
  return table.series[lookup_g0_index(table, c)];
}

void write_table(const std::string& path, const GreensTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const char* kindName = table.rep.kind == DeltaKind::gaussian ? "gaussian" : "dirichlet";
  char header[256];
  const int len = std::snprintf(header, sizeof(header), "HGT1\n%d %.17g %d %s %.17g %.17g %.17g\n",
                                table.rungCount() - 1, table.dt, table.nt, kindName, table.rep.eps,
                                table.cMin, table.deltaC);
  out.write(header, len);
  static_assert(std::endian::native == std::endian::little);
  for (const auto& rung : table.series)
    out.write(reinterpret_cast<const char*>(rung.data()),
              static_cast<std::streamsize>(rung.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed for " + path);
}

GreensTable read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  if (!std::getline(in, magic)) throw FormatError("missing magic line", 0);
  if (magic != "HGT1") throw FormatError("bad magic, expected HGT1", 0);
  std::string headerLine;
  if (!std::getline(in, headerLine)) throw FormatError("missing header line", 5);
  std::istringstream hs(headerLine);
  int I = 0, nt = 0;
  double dt = 0, eps = 0, cMin = 0, deltaC = 0;
  std::string kindName;
  if (!(hs >> I >> dt >> nt >> kindName >> eps >> cMin >> deltaC))
    throw FormatError("unparsable header", 5);
  if (I < 0 || nt < 1 || !(dt > 0) || !(eps > 0) || !(deltaC > 0))
    throw FormatError("invalid header values", 5);
  GreensTable table;
  table.cMin = cMin;
  table.deltaC = deltaC;
  table.dt = dt;
  table.nt = nt;
  if (kindName == "gaussian")
    table.rep = {DeltaKind::gaussian, eps};
  else if (kindName == "dirichlet")
    table.rep = {DeltaKind::dirichlet, eps};
  else
    throw FormatError("unknown epsKind '" + kindName + "'", 5);
  table.preroll = static_cast<int>(std::ceil(5.0 * eps / dt - 1e-12));
  // timeZero is a deterministic function of the header fields.
  table.timeZero = table.preroll - static_cast<int>(std::llround(locate_peak(table.rep) / dt));
  table.series.assign(I + 1, std::vector<double>(nt));
  std::uint64_t offset = static_cast<std::uint64_t>(in.tellg());
  for (auto& rung : table.series) {
    in.read(reinterpret_cast<char*>(rung.data()), static_cast<std::streamsize>(rung.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != rung.size() * sizeof(double))
      throw FormatError("truncated payload", offset + static_cast<std::uint64_t>(in.gcount()));
    offset += rung.size() * sizeof(double);
  }
  return table;
}

}  // namespace hg
