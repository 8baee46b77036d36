#include "hg/amplitude.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hg {

namespace {

struct Mat2 {
  // Row-major 2x2.
  double a = 0, b = 0, c = 0, d = 0;

  static Mat2 identity() { return {1, 0, 0, 1}; }
  double det() const { return a * d - b * c; }
};

inline Mat2 operator+(Mat2 m, Mat2 n) { return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d}; }
inline Mat2 operator*(double s, Mat2 m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }
inline Mat2 mul(Mat2 m, Mat2 n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}
inline Mat2 transpose(Mat2 m) { return {m.a, m.c, m.b, m.d}; }

// Combined state for the ray and its variational system.
struct VarState {
  PhasePoint s;
  Mat2 X;  // grad_x0 x
  Mat2 P;  // grad_x0 p
};

struct VarDeriv {
  Vec2 dx, dp;
  Mat2 dX, dP;
};

// Hamiltonian H = c(x)|p|. On the shell |p| = eta the mixed blocks are
//   Hpx = c * p * grad(c)^T,  Hxx = hess(c)/c,  Hpp = c^2 (I - c^2 p p^T).
bool variational_rhs(const MediumModel& m, const VarState& y, VarDeriv& out) {
  const auto node = nearest_node(m.slowness.grid, y.s.x);
  if (!node) return false;
  const SlownessSample sl = slowness_and_gradient_at(m, *node);
  const double eta = sl.eta;
  const double c = 1.0 / eta;
  const Vec2 gradC = (-c * c) * sl.grad;
  const auto hc = speed_hessian_at(m, *node);
  const Vec2 p = y.s.p;

  const Mat2 Hpx{c * p.x * gradC.x, c * p.x * gradC.y, c * p.y * gradC.x, c * p.y * gradC.y};
  const Mat2 Hxx{eta * hc[0], eta * hc[1], eta * hc[1], eta * hc[2]};
  const double c2 = c * c;
  const Mat2 Hpp{c2 * (1.0 - c2 * p.x * p.x), c2 * (-c2 * p.x * p.y),
                 c2 * (-c2 * p.y * p.x), c2 * (1.0 - c2 * p.y * p.y)};

  out.dx = p / (eta * eta);
  out.dp = sl.grad / eta;
  out.dX = mul(Hpx, y.X) + mul(Hpp, y.P);
  out.dP = -1.0 * (mul(Hxx, y.X) + mul(transpose(Hpx), y.P));
  return true;
}

inline VarState advance(const VarState& y, const VarDeriv& k, double h) {
  return {{y.s.x + h * k.dx, y.s.p + h * k.dp}, y.X + h * k.dX, y.P + h * k.dP};
}

// Recompute Maslov counts from sign changes of q, zeros bridged by the last
// nonzero sign.
std::vector<int> maslov_from_signs(const std::vector<double>& q) {
  std::vector<int> m(q.size(), 0);
  int count = 0;
  double lastSign = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double s = q[j] > 0.0 ? 1.0 : (q[j] < 0.0 ? -1.0 : 0.0);
    if (s != 0.0) {
      if (lastSign != 0.0 && s != lastSign) ++count;
      lastSign = s;
    }
    m[j] = count;
  }
  return m;
}

}  // namespace

RayDensity jacobian_ode(const MediumModel& medium, const RayTrajectory& ray, double deltaX) {
  RayDensity d;
  d.method = JacobianMethod::ode;
  if (ray.samples.empty() || (ray.exitedAt && *ray.exitedAt == 0)) return d;
  if (!(deltaX > 0.0)) throw std::invalid_argument("jacobian_ode: need deltaX > 0");

  VarState y;
  y.s = ray.samples.front();
  y.X = Mat2::identity();
  // Spherical-wavefront Hessian at the initial point, c locally constant:
  // grad_x0 p(0) = eta0/deltaX * (I - phat phat^T).
  const double pn = norm(y.s.p);
  const Vec2 ph = y.s.p / pn;
  const double eta0 = slowness_and_gradient(medium, y.s.x).eta;
  const double k = eta0 / deltaX;
  y.P = Mat2{k * (1.0 - ph.x * ph.x), k * (-ph.x * ph.y), k * (-ph.y * ph.x), k * (1.0 - ph.y * ph.y)};

  d.q.reserve(ray.samples.size());
  d.q.push_back(y.X.det());

  const double h = ray.dt;
  VarDeriv k1, k2;
  for (int j = 1; j < ray.size(); ++j) {
    if (!variational_rhs(medium, y, k1)) break;
    const VarState mid = advance(y, k1, 0.5 * h);
    if (!variational_rhs(medium, mid, k2)) break;
    y = advance(y, k2, h);
    // The tracer rescales p onto |p| = eta(x) after every step; the
    // variational state has to flow through the same map:
    //   p' = eta(x) p/|p|  =>  P' = phat grad(eta)^T X + (eta/|p|) (I - phat phat^T) P.
    {
      const Vec2 pRaw = y.s.p;
      const double pn = norm(pRaw);
      const auto node = nearest_node(medium.slowness.grid, y.s.x);
      if (!node || pn == 0.0) break;
      const SlownessSample sl = slowness_and_gradient_at(medium, *node);
      const Vec2 ph = pRaw / pn;
      const Mat2 proj{1.0 - ph.x * ph.x, -ph.x * ph.y, -ph.y * ph.x, 1.0 - ph.y * ph.y};
      const Mat2 outer{ph.x * sl.grad.x, ph.x * sl.grad.y, ph.y * sl.grad.x, ph.y * sl.grad.y};
      y.P = mul(outer, y.X) + (sl.eta / pn) * mul(proj, y.P);
    }
    // Keep the phase-space path identical to the stored trajectory.
    y.s = ray.samples[j];
    d.q.push_back(y.X.det());
  }
  d.maslov = maslov_from_signs(d.q);
  return d;
}

RayDensity jacobian_proximal(const MediumModel& medium, const RayTrajectory& ray,
                             double deltaTheta, double deltaX) {
  RayDensity d;
  d.method = JacobianMethod::proximal;
  if (ray.size() < 2 || (ray.exitedAt && *ray.exitedAt == 0)) return d;
  if (!(deltaTheta > 0.0)) throw std::invalid_argument("jacobian_proximal: need deltaTheta > 0");

  // Auxiliary ray: rotate the launch direction by deltaTheta about the
  // shooting point and respawn at the same offset.
  const Vec2 p0 = ray.samples.front().p;
  const Vec2 dirAux = rotated(p0 / norm(p0), deltaTheta);
  const Vec2 spawnAux = ray.shootingPoint + deltaX * dirAux;
  double etaAux = 0.0;
  if (const auto node = nearest_node(medium.slowness.grid, spawnAux))
    etaAux = medium.slowness.values[node->idx];
  else
    return d;  // auxiliary spawn already outside: no usable density
  const double T = ray.dt * (ray.size() - 1);
  const RayTrajectory aux = trace_ray(medium, spawnAux, etaAux * dirAux, ray.dt, std::max(T, ray.dt));

  const int n = std::min(ray.size(), aux.size());
  if (n < 2) return d;
  d.q.reserve(n);
  for (int j = 0; j < n; ++j) {
    const Vec2 dTheta = (aux.samples[j].x - ray.samples[j].x) / deltaTheta;
    const int jr = (j + 1 < ray.size()) ? j : j - 1;
    const Vec2 dTau = (ray.samples[jr + 1].x - ray.samples[jr].x) / ray.dt;
    d.q.push_back(cross(dTheta, dTau));
  }
  // Orientation depends on the rotation sense; normalize so q[0] > 0.
  if (d.q[0] < 0.0)
    for (double& v : d.q) v = -v;
  d.maslov = maslov_from_signs(d.q);
  return d;
}

std::vector<std::complex<double>> amplitude_along(const RayTrajectory& ray,
                                                  const RayDensity& density,
                                                  const MediumModel& medium, double A0) {
  const int n = std::min(ray.size(), density.size());
  std::vector<std::complex<double>> A(n);
  if (n == 0) return A;
  const double q0 = density.q[0];
  const double eta0 = slowness_and_gradient(medium, ray.samples.front().x).eta;
  static const std::complex<double> phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < n; ++j) {
    const double qj = density.q[j];
    if (qj == 0.0) {
      A[j] = {nan, nan};
      continue;
    }
    const auto node = nearest_node(medium.slowness.grid, ray.samples[j].x);
    const double eta = node ? medium.slowness.values[node->idx] : eta0;
    const double mag = A0 * (eta0 / eta) * std::sqrt(std::abs(q0 / qj));
    A[j] = mag * phase[density.maslov[j] & 3];
  }
  return A;
}

RayDensity reversed_density(const RayDensity& density) {
  if (density.q.empty()) return density;
  const int N = density.size() - 1;
  const double qN = density.q[N];
  if (qN == 0.0) throw std::domain_error("reversed_density: q(T) == 0, reversal undefined at a caustic endpoint");
  RayDensity rev;
  rev.method = density.method;
  rev.q.resize(density.q.size());
  for (int j = 0; j <= N; ++j) rev.q[j] = density.q[N - j] / qN;
  rev.maslov = maslov_from_signs(rev.q);
  return rev;
}

AttenuationProfile attenuations(const RayTrajectory& ray, const RayDensity& density,
                                const MediumModel& medium) {
  const int n = std::min(ray.size(), density.size());
  AttenuationProfile a;
  a.mu.resize(n);
  a.muR.resize(n);
  if (n == 0) return a;
  const double q0 = density.q[0];
  const double eta0 = slowness_and_gradient(medium, ray.samples.front().x).eta;
  for (int j = 0; j < n; ++j) {
    const auto node = nearest_node(medium.slowness.grid, ray.samples[j].x);
    const double eta = node ? medium.slowness.values[node->idx] : eta0;
    a.mu[j] = (eta0 / eta) * std::sqrt(std::abs(q0 / density.q[j]));
    a.muR[j] = 1.0 / a.mu[j];
  }
  return a;
}

}  // namespace hg
