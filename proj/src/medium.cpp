#include "hg/medium.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hg/errors.hpp"

namespace hg {

void validate(const CartesianGrid2D& grid) {
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("grid needs nx, ny >= 2");
  if (!(grid.dx > 0.0) || !(grid.dy > 0.0)) throw std::invalid_argument("grid needs dx, dy > 0");
}

ScalarField2D make_field(const CartesianGrid2D& grid, double fill) {
  validate(grid);
  ScalarField2D f;
  f.grid = grid;
  f.values.assign(static_cast<std::size_t>(grid.size()), fill);
  return f;
}

MediumModel make_medium(ScalarField2D soundSpeed) {
  MediumModel m;
  m.slowness = soundSpeed;
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  for (std::size_t k = 0; k < soundSpeed.values.size(); ++k) {
    const double c = soundSpeed.values[k];
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("sound speed must be finite and positive");
    m.slowness.values[k] = 1.0 / c;
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  m.soundSpeed = std::move(soundSpeed);
  m.cMin = cmin;
  m.cMax = cmax;
  return m;
}

MediumModel make_homogeneous_medium(const CartesianGrid2D& grid, double c) {
  return make_medium(make_field(grid, c));
}

double sample_nearest(const ScalarField2D& field, Vec2 x) {
  const auto node = nearest_node(field.grid, x);
  if (!node) throw std::out_of_range("sample_nearest: point outside grid");
  return field.values[node->idx];
}

SlownessSample slowness_and_gradient_at(const MediumModel& medium, const NearestNode& node) {
  const ScalarField2D& eta = medium.slowness;
  const CartesianGrid2D& g = eta.grid;
  const int i = node.i, j = node.j;
  SlownessSample s;
  s.eta = eta.values[node.idx];
  if (i == 0)
    s.grad.x = (eta.at(1, j) - eta.at(0, j)) / g.dx;
  else if (i == g.nx - 1)
    s.grad.x = (eta.at(i, j) - eta.at(i - 1, j)) / g.dx;
  else
    s.grad.x = (eta.at(i + 1, j) - eta.at(i - 1, j)) / (2.0 * g.dx);
  if (j == 0)
    s.grad.y = (eta.at(i, 1) - eta.at(i, 0)) / g.dy;
  else if (j == g.ny - 1)
    s.grad.y = (eta.at(i, j) - eta.at(i, j - 1)) / g.dy;
  else
    s.grad.y = (eta.at(i, j + 1) - eta.at(i, j - 1)) / (2.0 * g.dy);
  return s;
}

SlownessSample slowness_and_gradient(const MediumModel& medium, Vec2 x) {
  const auto node = nearest_node(medium.slowness.grid, x);
  if (!node) throw std::out_of_range("slowness_and_gradient: point outside grid");
  return slowness_and_gradient_at(medium, *node);
}

std::array<double, 3> speed_hessian_at(const MediumModel& medium, const NearestNode& node) {
  const ScalarField2D& c = medium.soundSpeed;
  const CartesianGrid2D& g = c.grid;
  // Clamp the stencil so edge nodes reuse the adjacent interior stencil.
  const int i = std::clamp(node.i, 1, g.nx - 2);
  const int j = std::clamp(node.j, 1, g.ny - 2);
  const double cxx = (c.at(i + 1, j) - 2.0 * c.at(i, j) + c.at(i - 1, j)) / (g.dx * g.dx);
  const double cyy = (c.at(i, j + 1) - 2.0 * c.at(i, j) + c.at(i, j - 1)) / (g.dy * g.dy);
  const double cxy = (c.at(i + 1, j + 1) - c.at(i + 1, j - 1) - c.at(i - 1, j + 1) + c.at(i - 1, j - 1)) /
                     (4.0 * g.dx * g.dy);
  return {cxx, cxy, cyy};
}

namespace {

// Smooth stroke profile: 1 at the centerline, 0 beyond one half-width.
double stroke_profile(double dist, double halfWidth) {
  const double u = dist / halfWidth;
  if (u >= 1.0) return 0.0;
  const double v = 1.0 - u * u;
  return v * v;
}

struct Stroke {
  // Cubic-ish parametric curve in unit coordinates (fractions of Lx, Ly).
  double ax, bx, cx, wx;   // x(s) = ax + bx*s + cx*sin(wx*s)
  double ay, by;           // y(s) = ay + by*s
  double halfWidthFrac;    // half width as a fraction of Lx
};

}  // namespace

Phantom make_vessel_phantom(const CartesianGrid2D& grid) {
  validate(grid);
  const double Lx = grid.lengthX();
  const double Ly = grid.lengthY();

  // Background speed: a gentle bowl, a fast band hugging the left edge that
  // strengthens away from the mid-left (bends grazing rays off the left
  // corners), a focusing slow blob below the top sensor, and a mild ripple.
  // The affine rescale pins the range to [1350, 1650] exactly.
  ScalarField2D craw = make_field(grid);
  const Vec2 blob{grid.origin.x + 0.5 * Lx, grid.origin.y + 0.55 * Ly};
  const double sigma = 0.13 * Lx;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      const double xf = (p.x - grid.origin.x) / Lx - 0.5;
      const double yf = (p.y - grid.origin.y) / Ly - 0.5;
      const double bowl = 1.1 * (xf * xf + 0.55 * yf * yf);
      const double edgeY = std::min(std::abs(yf - 0.12) / 0.30, 1.3);
      const double edge = 0.7 * std::exp(-(xf + 0.5) / 0.10) * edgeY;
      const double well = -std::exp(-norm2(p - blob) / (sigma * sigma));
      const double ripple = 0.06 * std::sin(2.2 * M_PI * (xf + 0.5)) * std::sin(1.7 * M_PI * (yf + 0.5) + 0.4);
      craw.at(i, j) = bowl + edge + well + ripple;
    }
  }
  const auto mm = std::minmax_element(craw.values.begin(), craw.values.end());
  const double lo = *mm.first;
  const double span = *mm.second - lo;
  ScalarField2D c = std::move(craw);
  for (double& v : c.values) v = 1350.0 + 300.0 * (v - lo) / span;

  // Vessel strokes, in fractions of the extent. Kept a few cells wide at the
  // reference resolution and clear of the fast left-edge band and corners,
  // where a boundary cone cannot see them.
  const Stroke strokes[] = {
      {0.30, 0.45, 0.06, 9.0, 0.12, 0.72, 0.028},
      {0.72, -0.30, 0.05, 7.0, 0.20, 0.55, 0.024},
      {0.32, 0.15, 0.08, 5.0, 0.62, 0.25, 0.022},
      {0.55, 0.25, 0.05, 11.0, 0.35, -0.22, 0.020},
      {0.45, -0.12, 0.06, 6.0, 0.80, 0.12, 0.026},
  };
  constexpr int kCurveSamples = 240;
  std::vector<Vec2> pts;
  pts.reserve(kCurveSamples);

  ScalarField2D u0 = make_field(grid);
  for (const Stroke& st : strokes) {
    pts.clear();
    for (int k = 0; k < kCurveSamples; ++k) {
      const double s = static_cast<double>(k) / (kCurveSamples - 1);
      const double xf = st.ax + st.bx * s + st.cx * std::sin(st.wx * s);
      const double yf = st.ay + st.by * s;
      pts.push_back({grid.origin.x + xf * Lx, grid.origin.y + yf * Ly});
    }
    const double hw = st.halfWidthFrac * Lx;
    // Only nodes within one half-width of the polyline can light up.
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        const Vec2 p = grid.node(i, j);
        double d2 = std::numeric_limits<double>::infinity();
        for (const Vec2& q : pts) d2 = std::min(d2, norm2(p - q));
        const double val = stroke_profile(std::sqrt(d2), hw);
        if (val > u0.at(i, j)) u0.at(i, j) = val;
      }
    }
  }

  Phantom ph;
  ph.medium = make_medium(std::move(c));
  ph.u0 = std::move(u0);
  return ph;
}

MediumModel make_lens_medium(const CartesianGrid2D& grid, double contrast, double c0) {
  validate(grid);
  if (contrast < 0.0 || contrast >= 0.5) throw std::invalid_argument("lens contrast must lie in [0, 0.5)");
  const Vec2 center{grid.origin.x + 0.5 * grid.lengthX(), grid.origin.y + 0.5 * grid.lengthY()};
  // Focal length ~ sigma/(2 sqrt(pi) contrast); this width lets a boundary
  // point source image inside the domain for contrasts around 0.2.
  const double sigma = 0.15 * std::min(grid.lengthX(), grid.lengthY());
  ScalarField2D c = make_field(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const Vec2 p = grid.node(i, j);
      c.at(i, j) = c0 * (1.0 - contrast * std::exp(-norm2(p - center) / (sigma * sigma)));
    }
  return make_medium(std::move(c));
}

namespace {

void write_f64_le(std::ofstream& out, const double* data, std::size_t n) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts need byte swaps here");
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void write_field(const std::string& path, const ScalarField2D& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char header[256];
  const int len = std::snprintf(header, sizeof(header), "HGF1\n%d %d %.17g %.17g %.17g %.17g\n",
                                field.grid.nx, field.grid.ny, field.grid.dx, field.grid.dy,
                                field.grid.origin.x, field.grid.origin.y);
  out.write(header, len);
  write_f64_le(out, field.values.data(), field.values.size());
  if (!out) throw std::runtime_error("write failed for " + path);
}

ScalarField2D read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string magic;
  if (!std::getline(in, magic)) throw FormatError("missing magic line", 0);
  if (magic != "HGF1") throw FormatError("bad magic, expected HGF1", 0);
  std::string headerLine;
  if (!std::getline(in, headerLine)) throw FormatError("missing header line", 5);
  std::istringstream hs(headerLine);
  CartesianGrid2D grid;
  if (!(hs >> grid.nx >> grid.ny >> grid.dx >> grid.dy >> grid.origin.x >> grid.origin.y))
    throw FormatError("unparsable header", 5);
  try {
    validate(grid);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid grid in header: ") + e.what(), 5);
  }
  ScalarField2D field;
  field.grid = grid;
  field.values.resize(static_cast<std::size_t>(grid.size()));
  const std::uint64_t payloadStart = static_cast<std::uint64_t>(in.tellg());
  in.read(reinterpret_cast<char*>(field.values.data()),
          static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != field.values.size() * sizeof(double))
    throw FormatError("truncated payload", payloadStart + static_cast<std::uint64_t>(in.gcount()));
  for (std::size_t k = 0; k < field.values.size(); ++k)
    if (!std::isfinite(field.values[k]))
      throw FormatError("non-finite sample", payloadStart + k * sizeof(double));
  return field;
}

}  // namespace hg
