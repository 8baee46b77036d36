#pragma once

#include <cstdint>
#include <vector>

#include "hg/medium.hpp"
#include "hg/operators.hpp"

namespace hg {

/// Full-wave reference solver: second order in time, fourth order in space,
/// with a quadratic absorbing sponge layer around the domain. padCells of
/// plain medium can be inserted before the sponge; with pad >= c T / (2 dx)
/// nothing reflected or trapped at the outer boundary reaches the recording
/// region within the run (the 2D quasi-static afterglow does not drain
/// through a velocity-damping layer, so free-field tails need distance, not
/// absorption).
struct FdtdConfig {
  double dtOracle = 0.0;
  int spongeDepth = 20;          // cells
  double spongeStrength = 6e6;   // 1/s at the outer sponge edge
  int padCells = 0;              // undamped margin inside the sponge
};

/// Pad covering propagation time T out and back.
int fdtd_pad_for(const CartesianGrid2D& grid, double cMax, double T);

double fdtd_cfl(const MediumModel& medium, double dtOracle);

/// Picks dtOracle = dt / m with the smallest integer m keeping the CFL number
/// at or below cflTarget.
FdtdConfig make_fdtd_config(const MediumModel& medium, double dt, double cflTarget = 0.45);

/// Initial value problem u(0) = u0, u_t(0) = 0; pressure recorded at the
/// nearest grid nodes to the sensors every dt (dt must be an integer multiple
/// of dtOracle).
std::vector<PressureTimeSeries> fdtd_forward(const MediumModel& medium, const ScalarField2D& u0,
                                             const SensorArray& sensors, double dt, double T,
                                             const FdtdConfig& cfg);

/// Time-varying point sources d/dt(g(T-t) w(T-t)) injected at the sensor
/// nodes, scaled by 1/(dx dy); returns the field at t = T.
ScalarField2D fdtd_adjoint(const MediumModel& medium, const std::vector<PressureTimeSeries>& data,
                           const SensorArray& sensors, const TimeWindow& w, double dt, double T,
                           const FdtdConfig& cfg);

/// Interior energy sum (u_t^2/c^2 + |grad u|^2) dx dy at every recording
/// step, for absorbing-layer checks.
std::vector<double> fdtd_energy_history(const MediumModel& medium, const ScalarField2D& u0,
                                        double dt, double T, const FdtdConfig& cfg);

/// Max over random trials of |<P u0, g> - <u0, P* g>| / (|P u0| |g|) for the
/// oracle pair, with smooth random u0 and band-limited random data.
double dot_test(const MediumModel& medium, const SensorArray& sensors, double dt, double T,
                const FdtdConfig& cfg, int trials, std::uint64_t seed = 12345,
                double taperFraction = 0.1);

}  // namespace hg
