#include "hg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hg/errors.hpp"

namespace hg {

double fdtd_cfl(const MediumModel& medium, double dtOracle) {
  const auto& g = medium.slowness.grid;
  return medium.cMax * dtOracle * std::sqrt(1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy));
}

FdtdConfig make_fdtd_config(const MediumModel& medium, double dt, double cflTarget) {
  FdtdConfig cfg;
  const double cfl1 = fdtd_cfl(medium, dt);
  const int m = std::max(1, static_cast<int>(std::ceil(cfl1 / cflTarget - 1e-12)));
  cfg.dtOracle = dt / m;
  return cfg;
}

int fdtd_pad_for(const CartesianGrid2D& grid, double cMax, double T) {
  return static_cast<int>(std::ceil(0.5 * cMax * T / std::min(grid.dx, grid.dy)));
}

namespace {

// Leapfrog stepper on the pad- and sponge-extended grid.
class FdtdSim {
 public:
  FdtdSim(const MediumModel& medium, double dt, const FdtdConfig& cfg)
      : grid_(medium.slowness.grid),
        sponge_(cfg.spongeDepth + cfg.padCells),
        ramp_(cfg.spongeDepth),
        dtO_(cfg.dtOracle) {
    if (!(cfg.dtOracle > 0.0)) throw ConfigError("fdtd: dtOracle must be > 0");
    if (fdtd_cfl(medium, cfg.dtOracle) > 0.5 + 1e-12)
      throw ConfigError("fdtd: CFL number exceeds 0.5");
    const double ratio = dt / cfg.dtOracle;
    stride_ = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - stride_) > 1e-9 || stride_ < 1)
      throw ConfigError("fdtd: dt must be an integer multiple of dtOracle");

    nx_ = grid_.nx + 2 * sponge_;
    ny_ = grid_.ny + 2 * sponge_;
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    c2dt2_.resize(n);
    sigmaDt_.resize(n);
    prev_.assign(n, 0.0);
    cur_.assign(n, 0.0);
    next_.assign(n, 0.0);

    for (int j = 0; j < ny_; ++j) {
      for (int i = 0; i < nx_; ++i) {
        // Sound speed extended by edge replication.
        const int ii = std::clamp(i - sponge_, 0, grid_.nx - 1);
        const int jj = std::clamp(j - sponge_, 0, grid_.ny - 1);
        const double c = medium.soundSpeed.at(ii, jj);
        c2dt2_[idx(i, j)] = c * c * dtO_ * dtO_;
        // Quadratic damping ramp across the outer spongeDepth cells; the pad
        // stays undamped.
        const int dLeft = sponge_ - i;
        const int dRight = i - (nx_ - 1 - sponge_);
        const int dBot = sponge_ - j;
        const int dTop = j - (ny_ - 1 - sponge_);
        const int margin = std::max({dLeft, dRight, dBot, dTop, 0});
        const int depth = std::max(margin - (sponge_ - ramp_), 0);
        const double frac = ramp_ > 0 ? static_cast<double>(depth) / ramp_ : 0.0;
        sigmaDt_[idx(i, j)] = cfg.spongeStrength * frac * frac * dtO_;
      }
    }
  }

  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  std::size_t interior_idx(int i, int j) const { return idx(i + sponge_, j + sponge_); }
  int stride() const { return stride_; }
  double dtOracle() const { return dtO_; }

  void set_initial(const ScalarField2D& u0) {
    for (int j = 0; j < grid_.ny; ++j)
      for (int i = 0; i < grid_.nx; ++i) cur_[interior_idx(i, j)] = u0.at(i, j);
    // u_t(0) = 0: first step by the Taylor half step.
    laplacian(cur_, next_);
    for (std::size_t k = 0; k < cur_.size(); ++k)
      next_[k] = cur_[k] + 0.5 * c2dt2_[k] * next_[k];
    prev_ = cur_;
    std::swap(cur_, next_);
    stepCount_ = 1;
  }

  /// One leapfrog step; optional point source adds c^2 dt^2 * amp at a node.
  template <typename SourceFn>
  void step(SourceFn&& source) {
    laplacian(cur_, next_);
    for (std::size_t k = 0; k < cur_.size(); ++k) {
      const double s = sigmaDt_[k];
      next_[k] = (2.0 * cur_[k] - (1.0 - s) * prev_[k] + c2dt2_[k] * next_[k]) / (1.0 + s);
    }
    source(next_);
    std::swap(prev_, cur_);
    std::swap(cur_, next_);
    ++stepCount_;
  }

  double at_interior(int i, int j) const { return cur_[interior_idx(i, j)]; }
  double at_interior_prev(int i, int j) const { return prev_[interior_idx(i, j)]; }
  int step_count() const { return stepCount_; }
  const CartesianGrid2D& grid() const { return grid_; }
  double c2dt2_at(std::size_t k) const { return c2dt2_[k]; }

  /// Interior energy (u_t^2/c^2 + |grad u|^2) dx dy with u_t backward in time.
  double interior_energy() const {
    double e = 0.0;
    for (int j = 1; j < grid_.ny - 1; ++j) {
      for (int i = 1; i < grid_.nx - 1; ++i) {
        const std::size_t k = interior_idx(i, j);
        const double ut = (cur_[k] - prev_[k]) / dtO_;
        const double ux = (cur_[k + 1] - cur_[k - 1]) / (2.0 * grid_.dx);
        const double uy = (cur_[k + nx_] - cur_[k - nx_]) / (2.0 * grid_.dy);
        const double c2 = c2dt2_[k] / (dtO_ * dtO_);
        e += ut * ut / c2 + ux * ux + uy * uy;
      }
    }
    return e * grid_.dx * grid_.dy;
  }

 private:
  void laplacian(const std::vector<double>& u, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const double ax = 1.0 / (12.0 * grid_.dx * grid_.dx);
    const double ay = 1.0 / (12.0 * grid_.dy * grid_.dy);
    for (int j = 2; j < ny_ - 2; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nx_;
      for (int i = 2; i < nx_ - 2; ++i) {
        const std::size_t k = row + i;
        const double lx = -u[k - 2] + 16.0 * u[k - 1] - 30.0 * u[k] + 16.0 * u[k + 1] - u[k + 2];
        const double ly = -u[k - 2 * static_cast<std::size_t>(nx_)] + 16.0 * u[k - nx_] -
                          30.0 * u[k] + 16.0 * u[k + nx_] - u[k + 2 * static_cast<std::size_t>(nx_)];
        out[k] = ax * lx + ay * ly;
      }
    }
  }

  CartesianGrid2D grid_;
  int sponge_;
  int ramp_;
  double dtO_;
  int nx_ = 0, ny_ = 0;
  int stride_ = 1;
  int stepCount_ = 0;
  std::vector<double> c2dt2_, sigmaDt_, prev_, cur_, next_;
};

std::vector<NearestNode> sensor_nodes(const CartesianGrid2D& grid, const SensorArray& sensors) {
  std::vector<NearestNode> nodes;
  nodes.reserve(sensors.positions.size());
  for (const Vec2& p : sensors.positions) {
    const auto node = nearest_node(grid, p);
    if (!node) throw ConfigError("fdtd: sensor outside the grid");
    nodes.push_back(*node);
  }
  return nodes;
}

}  // namespace

std::vector<PressureTimeSeries> fdtd_forward(const MediumModel& medium, const ScalarField2D& u0,
                                             const SensorArray& sensors, double dt, double T,
                                             const FdtdConfig& cfg) {
  if (!(u0.grid == medium.slowness.grid)) throw ConfigError("fdtd_forward: u0 grid mismatch");
  FdtdSim sim(medium, dt, cfg);
  const auto nodes = sensor_nodes(medium.slowness.grid, sensors);
  const int nt = static_cast<int>(std::llround(T / dt));

  std::vector<PressureTimeSeries> out(sensors.positions.size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m].sensorIndex = static_cast<int>(m);
    out[m].dt = dt;
    out[m].values.assign(nt, 0.0);
  }
  auto record = [&](int k) {
    for (std::size_t m = 0; m < nodes.size(); ++m)
      out[m].values[k] = sim.at_interior_prev(nodes[m].i, nodes[m].j);
  };

  sim.set_initial(u0);
  record(0);  // prev_ holds u at t=0 after the initial half step
  const int stride = sim.stride();
  for (int k = 1; k < nt; ++k) {
    while (sim.step_count() < k * stride + 1) sim.step([](std::vector<double>&) {});
    // u at t_k now sits in prev_ when step_count == k*stride + 1.
    record(k);
  }
  return out;
}

ScalarField2D fdtd_adjoint(const MediumModel& medium, const std::vector<PressureTimeSeries>& data,
                           const SensorArray& sensors, const TimeWindow& w, double dt, double T,
                           const FdtdConfig& cfg) {
  if (data.size() != sensors.positions.size())
    throw ConfigError("fdtd_adjoint: one series per sensor required");
  FdtdSim sim(medium, dt, cfg);
  const auto& grid = medium.slowness.grid;
  const auto nodes = sensor_nodes(grid, sensors);
  const int nt = static_cast<int>(std::llround(T / dt));
  for (const auto& s : data)
    if (static_cast<int>(s.values.size()) < nt) throw ConfigError("fdtd_adjoint: series shorter than T/dt");

  const int stride = sim.stride();
  const int nFine = (nt - 1) * stride;  // run to t = (nt-1) dt
  const double dtO = sim.dtOracle();
  const double durT = (nt - 1) * dt;

  // Windowed data reversed in fine time: h_m(n) = (g w)(T - t_n), linear
  // interpolation between coarse samples.
  const std::size_t M = data.size();
  std::vector<std::vector<double>> h(M, std::vector<double>(nFine + 1, 0.0));
  for (std::size_t m = 0; m < M; ++m) {
    for (int n = 0; n <= nFine; ++n) {
      const double tr = durT - n * dtO;
      const double u = tr / dt;
      const int k0 = std::clamp(static_cast<int>(std::floor(u)), 0, nt - 1);
      const int k1 = std::min(k0 + 1, nt - 1);
      const double f = u - k0;
      const double g0 = data[m].values[k0] * time_window(w, k0 * dt);
      const double g1 = data[m].values[k1] * time_window(w, k1 * dt);
      h[m][n] = (1.0 - f) * g0 + f * g1;
    }
  }
  // Central-difference time derivative of the reversed, windowed data.
  std::vector<std::vector<double>> src(M, std::vector<double>(nFine + 1, 0.0));
  for (std::size_t m = 0; m < M; ++m) {
    for (int n = 0; n <= nFine; ++n) {
      const int n0 = std::max(0, n - 1);
      const int n1 = std::min(nFine, n + 1);
      src[m][n] = (h[m][n1] - h[m][n0]) / ((n1 - n0) * dtO);
    }
  }

  const double cellInv = 1.0 / (grid.dx * grid.dy);
  ScalarField2D zero = make_field(grid);
  sim.set_initial(zero);
  // set_initial already performed step 1 with no source; the state there is
  // still zero, so only the t=0 source half-impulse (O(dtO^2)) is dropped.
  while (sim.step_count() < nFine) {
    const int n = sim.step_count();  // source evaluated at the current time level
    sim.step([&](std::vector<double>& next) {
      for (std::size_t m = 0; m < M; ++m) {
        const std::size_t k = sim.interior_idx(nodes[m].i, nodes[m].j);
        next[k] += sim.c2dt2_at(k) * src[m][n] * cellInv;
      }
    });
  }

  // cur_ now holds the source-problem field at t = (nt-1) dt. The recorded
  // operator pairs with it through the 1/c^2 weight of the Green's
  // representation, so that factor belongs to the returned image.
  ScalarField2D v = make_field(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double c = medium.soundSpeed.at(i, j);
      v.at(i, j) = sim.at_interior(i, j) / (c * c);
    }
  return v;
}

std::vector<double> fdtd_energy_history(const MediumModel& medium, const ScalarField2D& u0,
                                        double dt, double T, const FdtdConfig& cfg) {
  FdtdSim sim(medium, dt, cfg);
  const int nt = static_cast<int>(std::llround(T / dt));
  const int stride = sim.stride();
  std::vector<double> energy;
  energy.reserve(nt);
  sim.set_initial(u0);
  energy.push_back(sim.interior_energy());
  for (int k = 1; k < nt; ++k) {
    while (sim.step_count() < k * stride + 1) sim.step([](std::vector<double>&) {});
    energy.push_back(sim.interior_energy());
  }
  return energy;
}

double dot_test(const MediumModel& medium, const SensorArray& sensors, double dt, double T,
                const FdtdConfig& cfg, int trials, std::uint64_t seed, double taperFraction) {
  if (trials < 1) throw std::invalid_argument("dot_test: trials >= 1");
  const auto& grid = medium.slowness.grid;
  const int nt = static_cast<int>(std::llround(T / dt));
  const TimeWindow w{(nt - 1) * dt, taperFraction};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Separable Gaussian blur over the grid, zeroed near the boundary.
  auto smooth_field = [&]() {
    ScalarField2D f = make_field(grid);
    for (double& v : f.values) v = normal(rng);
    const double sigma = 2.5;
    const int half = 8;
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int k = -half; k <= half; ++k) ksum += kernel[k + half] = std::exp(-0.5 * k * k / (sigma * sigma));
    for (double& v : kernel) v /= ksum;
    ScalarField2D tmp = make_field(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k)
          acc += kernel[k + half] * f.at(std::clamp(i + k, 0, grid.nx - 1), j);
        tmp.at(i, j) = acc;
      }
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        double acc = 0.0;
        for (int k = -half; k <= half; ++k)
          acc += kernel[k + half] * tmp.at(i, std::clamp(j + k, 0, grid.ny - 1));
        f.at(i, j) = acc;
      }
    const int margin = 6;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        if (i < margin || j < margin || i >= grid.nx - margin || j >= grid.ny - margin)
          f.at(i, j) = 0.0;
    return f;
  };

  // Band-limited random data: Gaussian smoothing over ~1.5 coarse samples.
  auto smooth_series = [&]() {
    std::vector<PressureTimeSeries> g(sensors.positions.size());
    const double sigma = 1.5;
    const int half = 6;
    std::vector<double> kernel(2 * half + 1);
    double ksum = 0.0;
    for (int k = -half; k <= half; ++k) ksum += kernel[k + half] = std::exp(-0.5 * k * k / (sigma * sigma));
    for (double& v : kernel) v /= ksum;
    for (std::size_t m = 0; m < g.size(); ++m) {
      g[m].sensorIndex = static_cast<int>(m);
      g[m].dt = dt;
      std::vector<double> raw(nt);
      for (double& v : raw) v = normal(rng);
      g[m].values.assign(nt, 0.0);
      for (int k = 0; k < nt; ++k) {
        double acc = 0.0;
        for (int q = -half; q <= half; ++q) acc += kernel[q + half] * raw[std::clamp(k + q, 0, nt - 1)];
        g[m].values[k] = acc;
      }
    }
    return g;
  };

  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const ScalarField2D u0 = smooth_field();
    const auto g = smooth_series();

    auto pu = fdtd_forward(medium, u0, sensors, dt, T, cfg);
    double lhs = 0.0, nPu = 0.0, nG = 0.0;
    for (std::size_t m = 0; m < pu.size(); ++m)
      for (int k = 0; k < nt; ++k) {
        const double wk = time_window(w, k * dt);
        const double puv = wk * pu[m].values[k];
        lhs += dt * puv * g[m].values[k];
        nPu += dt * puv * puv;
        nG += dt * g[m].values[k] * g[m].values[k];
      }
    const ScalarField2D v = fdtd_adjoint(medium, g, sensors, w, dt, T, cfg);
    double rhs = 0.0;
    for (std::size_t k = 0; k < v.values.size(); ++k) rhs += u0.values[k] * v.values[k];
    rhs *= grid.dx * grid.dy;

    const double denom = std::sqrt(nPu) * std::sqrt(nG);
    const double gap = denom > 0.0 ? std::abs(lhs - rhs) / denom : 0.0;
    worst = std::max(worst, gap);
  }
  return worst;
}

}  // namespace hg
