#include "hg/dim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hg {

namespace {

constexpr double kGradEps = 1e-12;  // s/m^2, below this a step is interface-free
// Relative slowness jump separating a resolved interface from grid-sampling
// noise; total internal reflection is only meaningful for the former.
constexpr double kResolvedJump = 5e-3;

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

DimTrajectory dim_trace(const MediumModel& medium, Vec2 x0, Vec2 p0, double dt, double T,
                        double deltaX) {
  if (!(dt > 0.0) || T < dt) throw std::invalid_argument("dim_trace: need dt > 0 and T >= dt");
  DimTrajectory traj;
  traj.dt = dt;
  traj.deltaX = deltaX;

  const auto startNode = nearest_node(medium.slowness.grid, x0);
  if (!startNode) {
    traj.samples.push_back({x0, p0});
    traj.alphaS.push_back(0.0);
    traj.alphaI.push_back(0.0);
    traj.arclength.push_back(0.0);
    traj.exitedAt = 0;
    return traj;
  }

  double etaPrev = medium.slowness.values[startNode->idx];
  PhasePoint state{x0, (etaPrev / norm(p0)) * p0};
  traj.samples.push_back(state);
  traj.alphaS.push_back(0.0);
  traj.alphaI.push_back(0.0);
  traj.arclength.push_back(0.0);

  const int nSteps = static_cast<int>(std::llround(T / dt));
  double L = 0.0;
  double alphaI = 0.0;

  for (int n = 0; n < nSteps; ++n) {
    const Vec2 stepVec = (dt / (etaPrev * etaPrev)) * state.p;
    const Vec2 xNext = state.x + stepVec;
    const auto node = nearest_node(medium.slowness.grid, xNext);
    if (!node) {
      traj.exitedAt = traj.size();
      break;
    }
    const SlownessSample sl = slowness_and_gradient_at(medium, *node);
    const double etaNext = sl.eta;
    const double stepLen = norm(stepVec);

    Vec2 pNext;
    const double gradNorm = norm(sl.grad);
    if (gradNorm < kGradEps || stepLen == 0.0) {
      // No detectable interface: pure translation, rescaled to the new shell.
      pNext = (etaNext / etaPrev) * state.p;
    } else {
      const Vec2 d = stepVec / stepLen;
      double cosInc = clamp_unit(dot(sl.grad, d) / gradNorm);
      // Normal co-directed with travel; angles measured from it on both sides.
      Vec2 nrm = sl.grad / gradNorm;
      if (cosInc < 0.0) {
        nrm = -1.0 * nrm;
        cosInc = -cosInc;
      }
      Vec2 tang = perp(nrm);
      double sinInc = dot(d, tang);
      if (sinInc < 0.0) {
        tang = -1.0 * tang;
        sinInc = -sinInc;
      }
      const double snell = (etaPrev / etaNext) * sinInc;
      if (snell > 1.0 && std::abs(etaNext / etaPrev - 1.0) > kResolvedJump) {
        // Genuinely reflective interface: no transmitted ray.
        traj.totalInternalReflection = true;
        break;
      }
      if (snell > 1.0) {
        // Grazing crossing of a sub-resolution sampling jump; carry the ray
        // through as a plain translation.
        pNext = (etaNext / etaPrev) * state.p;
      } else {
        const double thetaTr = std::asin(clamp_unit(snell));
        const double cosTr = std::cos(thetaTr);
        const double sinTr = std::sin(thetaTr);
        pNext = etaNext * (cosTr * nrm + sinTr * tang);

        // Transmission loss across the virtual interface.
        const double denom = etaPrev * cosInc + etaNext * cosTr;
        const double ratio = denom / (2.0 * etaPrev * cosInc);
        if (ratio > 0.0) alphaI += std::log(ratio);
      }
    }

    L += stepLen;
    state = {xNext, pNext};
    etaPrev = etaNext;
    traj.samples.push_back(state);
    traj.arclength.push_back(L);
    traj.alphaS.push_back(0.5 * std::log((L + deltaX) / deltaX));
    traj.alphaI.push_back(alphaI);
  }
  return traj;
}

std::vector<double> dim_amplitude(const DimTrajectory& traj, double A0) {
  std::vector<double> A(traj.alphaS.size());
  for (std::size_t j = 0; j < A.size(); ++j) A[j] = A0 * std::exp(-(traj.alphaS[j] + traj.alphaI[j]));
  return A;
}

ReversedAlpha dim_reversed_alpha(const DimTrajectory& traj) {
  ReversedAlpha out;
  const int N = traj.size() - 1;
  if (N < 0) return out;
  out.alphaR.resize(traj.samples.size(), 0.0);
  const double LT = traj.arclength[N];
  const double dX = traj.deltaX;
  double revI = 0.0;
  for (int j = 1; j <= N; ++j) {
    const double spreading = 0.5 * std::log((LT - traj.arclength[N - j] + dX) / dX);
    // Reversed interface increment for the crossing originally taken at
    // step N-j+1 -> counted when the reversed ray traverses it.
    const double dAlpha = traj.alphaI[N - j + 1] - traj.alphaI[N - j];
    const double rev = 2.0 - std::exp(dAlpha);
    if (rev <= 0.0) {
      out.flagged = true;
      out.alphaR[j] = out.alphaR[j - 1];
      continue;
    }
    revI += std::log(rev);
    out.alphaR[j] = spreading + revI;
  }
  return out;
}

}  // namespace hg
