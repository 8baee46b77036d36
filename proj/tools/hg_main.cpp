// Command-line front end for the Hamilton-Green acoustic solver and its
// full-wave reference. Exit codes: 0 success, 1 usage, 2 file/format,
// 3 numerical configuration.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hg/errors.hpp"
#include "hg/greens.hpp"
#include "hg/medium.hpp"
#include "hg/metrics.hpp"
#include "hg/operators.hpp"
#include "hg/oracle.hpp"

namespace {

struct GridSpec {
  int nx = 128;
  int ny = 256;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  if (std::sscanf(s.c_str(), "%dx%d", &g.nx, &g.ny) != 2)
    throw CLI::ValidationError("--grid", "expected NXxNY, e.g. 128x256");
  return g;
}

hg::DeltaRep make_rep(const std::string& kind, double eps) {
  if (kind == "gaussian") return {hg::DeltaKind::gaussian, eps};
  if (kind == "dirichlet") return {hg::DeltaKind::dirichlet, eps};
  throw hg::ConfigError("unknown delta representation '" + kind + "'");
}

void export_field_csv(const std::string& path, const hg::ScalarField2D& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "x,y,value\n";
  char line[128];
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      const hg::Vec2 p = f.grid.node(i, j);
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.x, p.y, f.at(i, j));
      out << line;
    }
}

void export_series_csv(const std::string& path, const std::vector<hg::PressureTimeSeries>& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "t";
  for (std::size_t m = 0; m < data.size(); ++m) out << ",s" << m;
  out << "\n";
  char cell[64];
  const std::size_t nt = data.empty() ? 0 : data.front().values.size();
  for (std::size_t k = 0; k < nt; ++k) {
    std::snprintf(cell, sizeof(cell), "%.17g", k * data.front().dt);
    out << cell;
    for (const auto& s : data) {
      std::snprintf(cell, sizeof(cell), ",%.17g", s.values[k]);
      out << cell;
    }
    out << "\n";
  }
}

bool looks_like(const std::string& path, const char* magic) {
  std::ifstream in(path, std::ios::binary);
  std::string line;
  return in && std::getline(in, line) && line == magic;
}

struct CommonOpts {
  std::string engine = "hg";
  std::string mediumPath, sensorsPath, outPath, tablePath, csvPath;
  double dt = 50e-9;
  double T = 40e-6;
  int rays = 2000;
  double deltaX = 0.0;
  double deltaC = 10.0;
  double eps = 0.0;
  std::string repKind = "gaussian";
  double taper = 0.1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool withEngine) {
  cmd->set_config("--config", "", "key = value configuration file; flags take precedence");
  if (withEngine) cmd->add_option("--engine", o.engine, "hg | fdtd")->check(CLI::IsMember({"hg", "fdtd"}));
  cmd->add_option("--medium", o.mediumPath, "HGF1 sound-speed file")->required();
  cmd->add_option("--sensors", o.sensorsPath, "sensor list, one 'x y' per line")->required();
  cmd->add_option("--out", o.outPath)->required();
  cmd->add_option("--dt", o.dt, "time step, s");
  cmd->add_option("--T", o.T, "propagation time, s");
  cmd->add_option("--rays", o.rays, "rays per cone");
  cmd->add_option("--deltax", o.deltaX, "ray spawn offset, m (default: grid dx)");
  cmd->add_option("--dc", o.deltaC, "kernel ladder increment, m/s");
  cmd->add_option("--eps", o.eps, "delta regularization width, s (default: 2 dt)");
  cmd->add_option("--rep", o.repKind, "gaussian | dirichlet")->check(CLI::IsMember({"gaussian", "dirichlet"}));
  cmd->add_option("--taper", o.taper, "measurement window taper fraction");
  cmd->add_option("--table", o.tablePath, "HGT1 kernel cache to reuse");
  cmd->add_option("--threads", o.threads, "worker threads")->envname("HG_THREADS");
  cmd->add_option("--csv", o.csvPath, "also export the output as CSV");
}

hg::SolverConfig to_config(const CommonOpts& o, bool nonneg = false) {
  hg::SolverConfig cfg;
  cfg.nRays = o.rays;
  cfg.dt = o.dt;
  cfg.T = o.T;
  cfg.deltaX = o.deltaX;
  cfg.deltaC = o.deltaC;
  cfg.rep = make_rep(o.repKind, o.eps);
  cfg.taperFraction = o.taper;
  cfg.threads = o.threads;
  cfg.nonneg = nonneg;
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Hamilton-Green photoacoustic forward/adjoint solver"};
  app.require_subcommand(1);

  // phantom
  auto* phantom = app.add_subcommand("phantom", "generate the vessel test scene");
  phantom->set_config("--config", "", "key = value configuration file; flags take precedence");
  std::string phGrid = "128x256";
  double phDx = 0.2e-3, phDy = 0.0, phLens = -1.0;
  std::string phMediumOut = "medium.hgf", phU0Out = "u0.hgf", phSensorsOut, phCsv;
  phantom->add_option("--grid", phGrid, "NXxNY");
  phantom->add_option("--dx", phDx, "grid spacing, m");
  phantom->add_option("--dy", phDy, "grid spacing in y (default: dx)");
  phantom->add_option("--out-medium", phMediumOut);
  phantom->add_option("--out-u0", phU0Out);
  phantom->add_option("--sensors-boundary", phSensorsOut, "write all boundary nodes as sensors");
  phantom->add_option("--lens", phLens, "emit a lens medium with this contrast instead");
  phantom->add_option("--csv", phCsv, "also export u0 as CSV");

  // table
  auto* table = app.add_subcommand("table", "precompute the kernel table");
  table->set_config("--config");
  double tCmin = 1350, tCmax = 1650, tDc = 10, tDt = 50e-9, tEps = 0.0;
  int tNt = 1024;
  std::string tRep = "gaussian", tOut = "kernels.hgt";
  table->add_option("--cmin", tCmin)->required();
  table->add_option("--cmax", tCmax)->required();
  table->add_option("--dc", tDc);
  table->add_option("--dt", tDt);
  table->add_option("--nt", tNt);
  table->add_option("--eps", tEps, "default: 2 dt");
  table->add_option("--rep", tRep)->check(CLI::IsMember({"gaussian", "dirichlet"}));
  table->add_option("--out", tOut);

  // forward
  auto* forward = app.add_subcommand("forward", "initial pressure -> sensor series");
  CommonOpts fo;
  std::string fU0Path;
  add_common(forward, fo, true);
  forward->add_option("--u0", fU0Path, "HGF1 initial pressure")->required();

  // adjoint
  auto* adjoint = app.add_subcommand("adjoint", "sensor series -> image at t = T");
  CommonOpts ao;
  std::string aDataPath;
  bool aNonneg = false;
  add_common(adjoint, ao, true);
  adjoint->add_option("--data", aDataPath, "HGS1 sensor data")->required();
  adjoint->add_flag("--nonneg", aNonneg, "project the image onto non-negative values");

  // compare
  auto* compare = app.add_subcommand("compare", "L2/Linf/NCC between two HGS1 or HGF1 files");
  std::string cA, cB;
  compare->add_option("a", cA)->required();
  compare->add_option("b", cB)->required();

  // dottest
  auto* dottest = app.add_subcommand("dottest", "forward/adjoint inner-product check (full-wave)");
  dottest->set_config("--config");
  std::string dGrid = "64x64";
  double dDx = 0.2e-3, dDt = 50e-9, dT = 12e-6, dTol = 1e-2;
  int dSensors = 8, dTrials = 3;
  dottest->add_option("--grid", dGrid);
  dottest->add_option("--dx", dDx);
  dottest->add_option("--dt", dDt);
  dottest->add_option("--T", dT);
  dottest->add_option("--sensors", dSensors);
  dottest->add_option("--trials", dTrials);
  dottest->add_option("--tol", dTol);

  // export
  auto* exportCmd = app.add_subcommand("export", "export an HGS1/HGF1 file as CSV");
  std::string eIn, eCsv;
  exportCmd->add_option("input", eIn)->required();
  exportCmd->add_option("--csv", eCsv, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1
  }

  if (phantom->parsed()) {
    const GridSpec spec = parse_grid(phGrid);
    hg::CartesianGrid2D grid{spec.nx, spec.ny, phDx, phDy > 0 ? phDy : phDx, {0, 0}};
    if (phLens >= 0.0) {
      const hg::MediumModel lens = hg::make_lens_medium(grid, phLens);
      hg::write_field(phMediumOut, lens.soundSpeed);
    } else {
      const hg::Phantom ph = hg::make_vessel_phantom(grid);
      hg::write_field(phMediumOut, ph.medium.soundSpeed);
      hg::write_field(phU0Out, ph.u0);
      if (!phCsv.empty()) export_field_csv(phCsv, ph.u0);
    }
    if (!phSensorsOut.empty()) hg::write_sensor_list(phSensorsOut, hg::boundary_sensors(grid));
    return 0;
  }

  if (table->parsed()) {
    const hg::DeltaRep rep = make_rep(tRep, tEps > 0 ? tEps : 2 * tDt);
    hg::write_table(tOut, hg::build_g0_table(tCmin, tCmax, tDc, tDt, tNt, rep));
    return 0;
  }

  if (forward->parsed()) {
    const hg::MediumModel medium = hg::make_medium(hg::read_field(fo.mediumPath));
    const hg::ScalarField2D u0 = hg::read_field(fU0Path);
    const hg::SensorArray sensors = hg::read_sensor_list(fo.sensorsPath);
    std::vector<hg::PressureTimeSeries> data;
    if (fo.engine == "hg") {
      const hg::SolverConfig cfg = to_config(fo);
      if (!fo.tablePath.empty()) {
        const hg::GreensTable tab = hg::read_table(fo.tablePath);
        data = hg::forward_all(medium, u0, sensors, cfg, &tab);
      } else {
        data = hg::forward_all(medium, u0, sensors, cfg);
      }
    } else {
      hg::FdtdConfig cfg = hg::make_fdtd_config(medium, fo.dt);
      cfg.padCells = hg::fdtd_pad_for(medium.slowness.grid, medium.cMax, fo.T);
      data = hg::fdtd_forward(medium, u0, sensors, fo.dt, fo.T, cfg);
      const int nt = static_cast<int>(std::llround(fo.T / fo.dt));
      const hg::TimeWindow w{(nt - 1) * fo.dt, fo.taper};
      for (auto& s : data)
        for (int k = 0; k < static_cast<int>(s.values.size()); ++k)
          s.values[k] *= hg::time_window(w, k * fo.dt);
    }
    hg::write_sensor_data(fo.outPath, data);
    if (!fo.csvPath.empty()) export_series_csv(fo.csvPath, data);
    return 0;
  }

  if (adjoint->parsed()) {
    const hg::MediumModel medium = hg::make_medium(hg::read_field(ao.mediumPath));
    const hg::SensorArray sensors = hg::read_sensor_list(ao.sensorsPath);
    const std::vector<hg::PressureTimeSeries> data = hg::read_sensor_data(aDataPath);
    hg::ScalarField2D img;
    if (ao.engine == "hg") {
      const hg::SolverConfig cfg = to_config(ao, aNonneg);
      if (!ao.tablePath.empty()) {
        const hg::GreensTable tab = hg::read_table(ao.tablePath);
        img = hg::adjoint_all(medium, data, sensors, cfg, &tab);
      } else {
        img = hg::adjoint_all(medium, data, sensors, cfg);
      }
    } else {
      hg::FdtdConfig cfg = hg::make_fdtd_config(medium, ao.dt);
      cfg.padCells = hg::fdtd_pad_for(medium.slowness.grid, medium.cMax, ao.T);
      const int nt = static_cast<int>(std::llround(ao.T / ao.dt));
      const hg::TimeWindow w{(nt - 1) * ao.dt, ao.taper};
      img = hg::fdtd_adjoint(medium, data, sensors, w, ao.dt, ao.T, cfg);
      if (aNonneg)
        for (double& v : img.values) v = std::max(v, 0.0);
    }
    hg::write_field(ao.outPath, img);
    if (!ao.csvPath.empty()) export_field_csv(ao.csvPath, img);
    return 0;
  }

  if (compare->parsed()) {
    std::vector<double> a, b;
    if (looks_like(cA, "HGS1")) {
      for (const auto& s : hg::read_sensor_data(cA))
        a.insert(a.end(), s.values.begin(), s.values.end());
      for (const auto& s : hg::read_sensor_data(cB))
        b.insert(b.end(), s.values.begin(), s.values.end());
    } else {
      a = hg::read_field(cA).values;
      b = hg::read_field(cB).values;
    }
    if (a.size() != b.size()) throw hg::ConfigError("compare: inputs have different sizes");
    std::printf("l2_gap   %.6e\n", hg::rel_l2_gap(a, b));
    std::printf("linf_gap %.6e\n", hg::linf_gap(a, b));
    std::printf("ncc      %.6f\n", hg::ncc(a, b));
    return 0;
  }

  if (dottest->parsed()) {
    const GridSpec spec = parse_grid(dGrid);
    hg::CartesianGrid2D grid{spec.nx, spec.ny, dDx, dDx, {0, 0}};
    const hg::Phantom ph = hg::make_vessel_phantom(grid);
    hg::SensorArray sensors;
    const hg::SensorArray all = hg::boundary_sensors(grid);
    for (int m = 0; m < dSensors; ++m)
      sensors.positions.push_back(all.positions[m * all.positions.size() / dSensors]);
    const hg::FdtdConfig cfg = hg::make_fdtd_config(ph.medium, dDt);
    const double gap = hg::dot_test(ph.medium, sensors, dDt, dT, cfg, dTrials);
    std::printf("dot test gap %.3e (tolerance %.3e)\n", gap, dTol);
    if (gap > dTol) throw hg::ConfigError("dot test gap exceeds tolerance");
    return 0;
  }

  if (exportCmd->parsed()) {
    if (looks_like(eIn, "HGS1"))
      export_series_csv(eCsv, hg::read_sensor_data(eIn));
    else
      export_field_csv(eCsv, hg::read_field(eIn));
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hg::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const hg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
