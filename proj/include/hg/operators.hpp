#pragma once

#include <string>
#include <vector>

#include "hg/amplitude.hpp"
#include "hg/greens.hpp"
#include "hg/medium.hpp"
#include "hg/ray.hpp"

namespace hg {

/// Ideal isotropic point detectors.
struct SensorArray {
  std::vector<Vec2> positions;

  int count() const { return static_cast<int>(positions.size()); }
};

/// Recorded pressure g(t_k) at one sensor, t_k = k * dt.
struct PressureTimeSeries {
  int sensorIndex = 0;
  double dt = 0.0;
  std::vector<double> values;
};

/// Smooth measurement-time cutoff: raised-cosine tapers of width
/// taperFraction * T at both ends, exactly zero at t = 0 and t = T, one on
/// the plateau. T is the duration of the sampled series, (nt - 1) * dt.
struct TimeWindow {
  double T = 0.0;
  double taperFraction = 0.1;
};

double time_window(const TimeWindow& w, double t);

struct SolverConfig {
  int nRays = 2000;
  double dt = 50e-9;
  double T = 40e-6;
  double deltaX = 0.0;   // ray spawn offset; 0 picks the grid spacing dx
  double deltaC = 10.0;  // ladder increment for the kernel table, m/s
  DeltaRep rep{DeltaKind::gaussian, 0.0};  // eps 0 picks 2 * dt
  double taperFraction = 0.1;
  bool nonneg = false;
  int threads = 1;
};

/// Kernel table sized for a run: ladder spans the medium's speed range, the
/// series covers the propagation window plus pre-roll and spawn delay.
GreensTable build_table_for(const MediumModel& medium, const SolverConfig& cfg);

/// One-sensor forward series (no measurement window): W(l) summed over the
/// cone's isotime samples, convolved with the sensor-speed kernel.
PressureTimeSeries forward_single_sensor(const MediumModel& medium, const ScalarField2D& u0,
                                         const RayCone& cone,
                                         const std::vector<RayDensity>& densities,
                                         const GreensTable& table);

std::vector<PressureTimeSeries> forward_all(const MediumModel& medium, const ScalarField2D& u0,
                                            const SensorArray& sensors, const SolverConfig& cfg,
                                            const GreensTable* table = nullptr);

/// Adjoint values on the cone's ray samples: values[ray][sample].
using ConeSampleValues = std::vector<std::vector<double>>;

ConeSampleValues adjoint_single_sensor(const MediumModel& medium, const PressureTimeSeries& g,
                                       const TimeWindow& w, const RayCone& cone,
                                       const std::vector<RayDensity>& densities,
                                       const GreensTable& table);

/// Nearest-ray-sample interpolation onto the grid; nodes farther than one
/// grid diagonal from every sample stay zero (shadow regions).
ScalarField2D rasterize_to_grid(const RayCone& cone, const ConeSampleValues& values,
                                const CartesianGrid2D& grid);

ScalarField2D adjoint_all(const MediumModel& medium, const std::vector<PressureTimeSeries>& data,
                          const SensorArray& sensors, const SolverConfig& cfg,
                          const GreensTable* table = nullptr);

/// All boundary nodes of the grid, deterministic order.
SensorArray boundary_sensors(const CartesianGrid2D& grid);

// HGS1 sensor data format: ASCII magic "HGS1\n", one ASCII header line
// "M nt dt\n", then M*nt binary64 LE values, sensor-major.
void write_sensor_data(const std::string& path, const std::vector<PressureTimeSeries>& data);
std::vector<PressureTimeSeries> read_sensor_data(const std::string& path);

// Sensor list: plain text, one "x y" pair (meters) per line.
void write_sensor_list(const std::string& path, const SensorArray& sensors);
SensorArray read_sensor_list(const std::string& path);

}  // namespace hg
