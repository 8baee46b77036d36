#include "hg/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hg/errors.hpp"
#include "hg/signal.hpp"
#include "hg/threading.hpp"

namespace hg {

namespace {

using cplx = std::complex<double>;

constexpr cplx kMaslovPhase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

int series_length(const RayCone& cone) { return static_cast<int>(std::llround(cone.T / cone.dt)); }

// Integer sample delay covering the spawn-offset leg from the sensor to the
// ray's initial point.
int spawn_delay(const MediumModel& medium, const RayCone& cone) {
  const auto node = nearest_node(medium.slowness.grid, cone.sensor);
  const double eta = node ? medium.slowness.values[node->idx] : 1.0 / medium.cMax;
  return static_cast<int>(std::llround(cone.raySpawnOffset * eta / cone.dt));
}

void check_table(const RayCone& cone, const GreensTable& table, int nt) {
  if (std::abs(table.dt - cone.dt) > 1e-12 * cone.dt)
    throw ConfigError("kernel table dt does not match the cone dt");
  if (table.nt < nt + table.timeZero)
    throw ConfigError("kernel table is too short for the propagation window");
}

}  // namespace

double time_window(const TimeWindow& w, double t) {
  if (t <= 0.0 || t >= w.T) return 0.0;
  const double taper = w.taperFraction * w.T;
  double edge = t;
  if (t > w.T - taper) edge = w.T - t;
  if (edge < taper) return 0.5 * (1.0 - std::cos(std::numbers::pi * edge / taper));
  return 1.0;
}

GreensTable build_table_for(const MediumModel& medium, const SolverConfig& cfg) {
  const double eps = cfg.rep.eps > 0.0 ? cfg.rep.eps : 2.0 * cfg.dt;
  const DeltaRep rep{cfg.rep.kind, eps};
  const int nt = static_cast<int>(std::llround(cfg.T / cfg.dt));
  const int preroll = static_cast<int>(std::ceil(5.0 * eps / cfg.dt - 1e-12));
  const double deltaX = cfg.deltaX > 0.0 ? cfg.deltaX : medium.slowness.grid.dx;
  const int dlyMax = static_cast<int>(std::ceil(deltaX / (medium.cMin * cfg.dt))) + 1;
  return build_g0_table(medium.cMin, medium.cMax, cfg.deltaC, cfg.dt, nt + preroll + dlyMax + 2, rep);
}

PressureTimeSeries forward_single_sensor(const MediumModel& medium, const ScalarField2D& u0,
                                         const RayCone& cone,
                                         const std::vector<RayDensity>& densities,
                                         const GreensTable& table) {
  const int nt = series_length(cone);
  const int dly = spawn_delay(medium, cone);
  check_table(cone, table, nt);
  if (densities.size() != cone.rays.size())
    throw ConfigError("one density per cone ray required");

  // Isotime sums W(l): complex so Maslov factors survive to the convolution.
  std::vector<double> Wre(nt, 0.0), Wim(nt, 0.0);
  const auto& grid = medium.slowness.grid;
  for (std::size_t r = 0; r < cone.rays.size(); ++r) {
    const RayTrajectory& ray = cone.rays[r];
    const RayDensity& d = densities[r];
    if (d.q.empty() || ray.samples.empty() || (ray.exitedAt && *ray.exitedAt == 0)) continue;
    const double q0 = d.q[0];
    const int len = std::min({ray.size(), d.size(), nt});
    for (int j = 0; j < len; ++j) {
      const double qj = d.q[j];
      if (qj == 0.0) continue;  // masked caustic sample
      const auto node = nearest_node(grid, ray.samples[j].x);
      if (!node) continue;
      const double u0v = u0.values[node->idx];
      if (u0v == 0.0) continue;
      const double wgt = medium.slowness.values[node->idx] * std::sqrt(q0 * std::abs(qj)) * u0v;
      const cplx ph = kMaslovPhase[d.maslov[j] & 3];
      Wre[j] += wgt * ph.real();
      Wim[j] += wgt * ph.imag();
    }
  }
  for (int j = 0; j < nt; ++j) {
    Wre[j] *= cone.deltaTheta;
    Wim[j] *= cone.deltaTheta;
  }

  const auto sensorNode = nearest_node(grid, cone.sensor);
  if (!sensorNode) throw ConfigError("sensor is outside the grid");
  const double etaSensor = medium.slowness.values[sensorNode->idx];
  const double cSensor = medium.soundSpeed.values[sensorNode->idx];
  const std::vector<cplx> kernel = analytic_signal(lookup_g0(table, cSensor));
  const int ntK = static_cast<int>(kernel.size());

  // u(t_k) = sqrt(dX) * eta(x0) * dt * Re sum_j W_j K((k - j - dly) dt);
  // the sqrt(dX) calibration makes the homogeneous case match the direct
  // Green's quadrature in absolute scale.
  PressureTimeSeries out;
  out.dt = cone.dt;
  out.values.assign(nt, 0.0);
  const double scale = std::sqrt(cone.raySpawnOffset) * etaSensor * cone.dt;
  for (int j = 0; j < nt; ++j) {
    if (Wre[j] == 0.0 && Wim[j] == 0.0) continue;
    const int k0 = std::max(0, j + dly - table.timeZero);
    const int k1 = std::min(nt - 1, j + dly - table.timeZero + ntK - 1);
    for (int k = k0; k <= k1; ++k) {
      const cplx& Kv = kernel[k - j - dly + table.timeZero];
      out.values[k] += Wre[j] * Kv.real() - Wim[j] * Kv.imag();
    }
  }
  for (double& v : out.values) v *= scale;
  return out;
}

namespace {

struct ConeWork {
  RayCone cone;
  std::vector<RayDensity> densities;
};

ConeWork make_cone_work(const MediumModel& medium, Vec2 sensor, const SolverConfig& cfg,
                        double deltaX) {
  ConeWork work;
  work.cone = shoot_cone(medium, sensor, cfg.nRays, cfg.dt, cfg.T, deltaX);
  work.densities.reserve(work.cone.rays.size());
  for (const RayTrajectory& ray : work.cone.rays)
    work.densities.push_back(jacobian_ode(medium, ray, deltaX));
  return work;
}

}  // namespace

std::vector<PressureTimeSeries> forward_all(const MediumModel& medium, const ScalarField2D& u0,
                                            const SensorArray& sensors, const SolverConfig& cfg,
                                            const GreensTable* table) {
  GreensTable local;
  if (!table) {
    local = build_table_for(medium, cfg);
    table = &local;
  }
  const double deltaX = cfg.deltaX > 0.0 ? cfg.deltaX : medium.slowness.grid.dx;
  const int nt = static_cast<int>(std::llround(cfg.T / cfg.dt));
  const TimeWindow w{(nt - 1) * cfg.dt, cfg.taperFraction};

  std::vector<PressureTimeSeries> out(sensors.positions.size());
  parallel_for(sensors.positions.size(), cfg.threads, [&](std::size_t m) {
    const ConeWork work = make_cone_work(medium, sensors.positions[m], cfg, deltaX);
    PressureTimeSeries series = forward_single_sensor(medium, u0, work.cone, work.densities, *table);
    for (int k = 0; k < static_cast<int>(series.values.size()); ++k)
      series.values[k] *= time_window(w, k * cfg.dt);
    series.sensorIndex = static_cast<int>(m);
    out[m] = std::move(series);
  });
  return out;
}

ConeSampleValues adjoint_single_sensor(const MediumModel& medium, const PressureTimeSeries& g,
                                       const TimeWindow& w, const RayCone& cone,
                                       const std::vector<RayDensity>& densities,
                                       const GreensTable& table) {
  if (std::abs(g.dt - cone.dt) > 1e-12 * cone.dt)
    throw ConfigError("sensor data dt does not match the cone dt");
  const int nt = static_cast<int>(g.values.size());
  const int dly = spawn_delay(medium, cone);
  check_table(cone, table, nt);
  if (densities.size() != cone.rays.size())
    throw ConfigError("one density per cone ray required");

  std::vector<double> gw(nt);
  for (int k = 0; k < nt; ++k) gw[k] = g.values[k] * time_window(w, k * cone.dt);

  const auto& grid = medium.slowness.grid;
  const auto sensorNode = nearest_node(grid, cone.sensor);
  if (!sensorNode) throw ConfigError("sensor is outside the grid");
  const double etaSensor = medium.slowness.values[sensorNode->idx];

  // Which rungs does this cone touch? Correlations are computed per rung,
  // once, then indexed at the sample's travel-time offset.
  const int maxLen = series_length(cone);
  std::vector<char> rungUsed(table.rungCount(), 0);
  for (std::size_t r = 0; r < cone.rays.size(); ++r) {
    const RayTrajectory& ray = cone.rays[r];
    const int len = std::min({ray.size(), densities[r].size(), maxLen});
    for (int j = 0; j < len; ++j) {
      const auto node = nearest_node(grid, ray.samples[j].x);
      if (node) rungUsed[lookup_g0_index(table, medium.soundSpeed.values[node->idx])] = 1;
    }
  }

  const int nI = maxLen + dly;  // correlation lags needed
  std::vector<std::vector<cplx>> corr(table.rungCount());
  for (int rIdx = 0; rIdx < table.rungCount(); ++rIdx) {
    if (!rungUsed[rIdx]) continue;
    const std::vector<cplx> kernel = analytic_signal(table.series[rIdx]);
    corr[rIdx].assign(nI, {0.0, 0.0});
    for (int i = 0; i < nI; ++i) {
      cplx acc{0.0, 0.0};
      const int m0 = std::max(0, table.timeZero - i);
      const int m1 = std::min<int>(static_cast<int>(kernel.size()) - 1, nt - 1 + table.timeZero - i);
      for (int m = m0; m <= m1; ++m) acc += kernel[m] * gw[m - table.timeZero + i];
      corr[rIdx][i] = acc * cone.dt;
    }
  }

  // Calibration: matches the exact transpose of the forward scale at the
  // reference spreading qBar, a domain-chord constant (the absolute scale of
  // the pair is a reported convention, outputs are compared normalized).
  const double qBar =
      1.0 + 0.25 * (grid.lengthX() + grid.lengthY()) / cone.raySpawnOffset;
  const double kappa =
      etaSensor * etaSensor * etaSensor / (std::sqrt(cone.raySpawnOffset) * qBar);
  ConeSampleValues values(cone.rays.size());
  for (std::size_t r = 0; r < cone.rays.size(); ++r) {
    const RayTrajectory& ray = cone.rays[r];
    const RayDensity& d = densities[r];
    if (d.q.empty() || ray.samples.empty() || (ray.exitedAt && *ray.exitedAt == 0)) continue;
    const double q0 = d.q[0];
    const int len = std::min({ray.size(), d.size(), maxLen});
    values[r].assign(len, 0.0);
    for (int j = 0; j < len; ++j) {
      const double qj = d.q[j];
      if (qj == 0.0) continue;
      const auto node = nearest_node(grid, ray.samples[j].x);
      if (!node) continue;
      const double eta = medium.slowness.values[node->idx];
      const int rIdx = lookup_g0_index(table, medium.soundSpeed.values[node->idx]);
      const cplx ph = kMaslovPhase[d.maslov[j] & 3];
      const double attn = (eta / etaSensor) * std::sqrt(q0 * std::abs(qj));
      values[r][j] = kappa * attn * (ph * corr[rIdx][j + dly]).real();
    }
  }
  return values;
}

ScalarField2D rasterize_to_grid(const RayCone& cone, const ConeSampleValues& values,
                                const CartesianGrid2D& grid) {
  ScalarField2D out = make_field(grid);
  struct Entry {
    Vec2 x;
    double v;
  };
  std::vector<std::vector<Entry>> buckets(static_cast<std::size_t>(grid.size()));
  for (std::size_t r = 0; r < cone.rays.size() && r < values.size(); ++r) {
    const RayTrajectory& ray = cone.rays[r];
    const int len = std::min<int>(ray.size(), static_cast<int>(values[r].size()));
    for (int j = 0; j < len; ++j) {
      const auto node = nearest_node(grid, ray.samples[j].x);
      if (node) buckets[node->idx].push_back({ray.samples[j].x, values[r][j]});
    }
  }
  const double diag2 = grid.dx * grid.dx + grid.dy * grid.dy;
  const int ring = static_cast<int>(std::ceil(std::sqrt(diag2) / std::min(grid.dx, grid.dy) + 0.5));
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      double best = std::numeric_limits<double>::infinity();
      double val = 0.0;
      for (int bj = std::max(0, j - ring); bj <= std::min(grid.ny - 1, j + ring); ++bj)
        for (int bi = std::max(0, i - ring); bi <= std::min(grid.nx - 1, i + ring); ++bi)
          for (const Entry& e : buckets[static_cast<std::size_t>(bj) * grid.nx + bi]) {
            const double d2 = norm2(e.x - p);
            if (d2 < best) {
              best = d2;
              val = e.v;
            }
          }
      out.at(i, j) = (best <= diag2) ? val : 0.0;
    }
  }
  return out;
}

ScalarField2D adjoint_all(const MediumModel& medium, const std::vector<PressureTimeSeries>& data,
                          const SensorArray& sensors, const SolverConfig& cfg,
                          const GreensTable* table) {
  if (data.size() != sensors.positions.size())
    throw ConfigError("adjoint_all: one series per sensor required");
  GreensTable local;
  if (!table) {
    local = build_table_for(medium, cfg);
    table = &local;
  }
  const double deltaX = cfg.deltaX > 0.0 ? cfg.deltaX : medium.slowness.grid.dx;
  const int nt = static_cast<int>(std::llround(cfg.T / cfg.dt));
  const TimeWindow w{(nt - 1) * cfg.dt, cfg.taperFraction};
  const auto& grid = medium.slowness.grid;

  ScalarField2D sum = make_field(grid);
  // Fixed-size blocks: parallel within a block, accumulation in sensor order.
  const std::size_t block = 16;
  std::vector<ScalarField2D> partial(std::min(block, sensors.positions.size()));
  for (std::size_t base = 0; base < sensors.positions.size(); base += block) {
    const std::size_t count = std::min(block, sensors.positions.size() - base);
    parallel_for(count, cfg.threads, [&](std::size_t k) {
      const std::size_t m = base + k;
      const ConeWork work = make_cone_work(medium, sensors.positions[m], cfg, deltaX);
      const ConeSampleValues values =
          adjoint_single_sensor(medium, data[m], w, work.cone, work.densities, *table);
      partial[k] = rasterize_to_grid(work.cone, values, grid);
    });
    for (std::size_t k = 0; k < count; ++k)
      for (std::size_t idx = 0; idx < sum.values.size(); ++idx)
        sum.values[idx] += partial[k].values[idx];
  }
  if (cfg.nonneg)
    for (double& v : sum.values) v = std::max(v, 0.0);
  return sum;
}

SensorArray boundary_sensors(const CartesianGrid2D& grid) {
  SensorArray s;
  for (int i = 0; i < grid.nx; ++i) s.positions.push_back(grid.node(i, 0));
  for (int j = 1; j < grid.ny - 1; ++j) {
    s.positions.push_back(grid.node(0, j));
    s.positions.push_back(grid.node(grid.nx - 1, j));
  }
  for (int i = 0; i < grid.nx; ++i) s.positions.push_back(grid.node(i, grid.ny - 1));
  return s;
}

void write_sensor_data(const std::string& path, const std::vector<PressureTimeSeries>& data) {
  if (data.empty()) throw std::invalid_argument("write_sensor_data: no series");
  const std::size_t nt = data.front().values.size();
  const double dt = data.front().dt;
  for (const auto& s : data)
    if (s.values.size() != nt || s.dt != dt)
      throw std::invalid_argument("write_sensor_data: series must share nt and dt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char header[128];
  const int len = std::snprintf(header, sizeof(header), "HGS1\n%zu %zu %.17g\n", data.size(), nt, dt);
  out.write(header, len);
  static_assert(std::endian::native == std::endian::little);
  for (const auto& s : data)
    out.write(reinterpret_cast<const char*>(s.values.data()),
              static_cast<std::streamsize>(nt * sizeof(double)));
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<PressureTimeSeries> read_sensor_data(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  if (!std::getline(in, magic)) throw FormatError("missing magic line", 0);
  if (magic != "HGS1") throw FormatError("bad magic, expected HGS1", 0);
  std::string headerLine;
  if (!std::getline(in, headerLine)) throw FormatError("missing header line", 5);
  std::istringstream hs(headerLine);
  long M = 0, nt = 0;
  double dt = 0.0;
  if (!(hs >> M >> nt >> dt) || M < 1 || nt < 1 || !(dt > 0.0))
    throw FormatError("unparsable header", 5);
  std::vector<PressureTimeSeries> data(static_cast<std::size_t>(M));
  std::uint64_t offset = static_cast<std::uint64_t>(in.tellg());
  for (long m = 0; m < M; ++m) {
    data[m].sensorIndex = static_cast<int>(m);
    data[m].dt = dt;
    data[m].values.resize(static_cast<std::size_t>(nt));
    in.read(reinterpret_cast<char*>(data[m].values.data()),
            static_cast<std::streamsize>(nt * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != static_cast<std::size_t>(nt) * sizeof(double))
      throw FormatError("truncated payload", offset + static_cast<std::uint64_t>(in.gcount()));
    offset += static_cast<std::uint64_t>(nt) * sizeof(double);
  }
  return data;
}

void write_sensor_list(const std::string& path, const SensorArray& sensors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char line[80];
  for (const Vec2& p : sensors.positions) {
    std::snprintf(line, sizeof(line), "%.17g %.17g\n", p.x, p.y);
    out << line;
  }
}

SensorArray read_sensor_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  SensorArray s;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += line.size() + 1;
      continue;
    }
    std::istringstream ls(line);
    Vec2 p;
    if (!(ls >> p.x >> p.y)) throw FormatError("unparsable sensor line", offset);
    s.positions.push_back(p);
    offset += line.size() + 1;
  }
  return s;
}

}  // namespace hg
