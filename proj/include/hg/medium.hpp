#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hg/geometry.hpp"

namespace hg {

/// Uniform Cartesian grid. Node (i, j) sits at origin + (i*dx, j*dy),
/// 0 <= i < nx, 0 <= j < ny.
struct CartesianGrid2D {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  Vec2 origin{0.0, 0.0};

  int size() const { return nx * ny; }
  Vec2 node(int i, int j) const { return {origin.x + i * dx, origin.y + j * dy}; }
  double lengthX() const { return (nx - 1) * dx; }
  double lengthY() const { return (ny - 1) * dy; }

  bool operator==(const CartesianGrid2D&) const = default;
};

/// Throws std::invalid_argument unless nx, ny >= 2 and dx, dy > 0.
void validate(const CartesianGrid2D& grid);

/// Samples on a grid, row-major with the x index fastest: values[j*nx + i].
struct ScalarField2D {
  CartesianGrid2D grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
};

ScalarField2D make_field(const CartesianGrid2D& grid, double fill = 0.0);

struct MediumModel {
  ScalarField2D soundSpeed;  // c(x), m/s
  ScalarField2D slowness;    // eta(x) = 1/c(x), s/m
  double cMin = 0.0;
  double cMax = 0.0;
};

/// Builds slowness and speed bounds from a sound-speed field.
MediumModel make_medium(ScalarField2D soundSpeed);
MediumModel make_homogeneous_medium(const CartesianGrid2D& grid, double c);

struct NearestNode {
  int i = 0;
  int j = 0;
  std::size_t idx = 0;
};

/// Nearest grid node in the L2 sense; equidistant points resolve to the
/// smallest linear index. A point is inside iff it lies within the grid
/// bounding box expanded by half a cell; otherwise nullopt (domain exit).
inline std::optional<NearestNode> nearest_node(const CartesianGrid2D& g, Vec2 x) {
  const double u = (x.x - g.origin.x) / g.dx;
  const double v = (x.y - g.origin.y) / g.dy;
  if (u < -0.5 || u > g.nx - 0.5 || v < -0.5 || v > g.ny - 0.5) return std::nullopt;
  // ceil(u - 0.5) picks the lower node on exact ties.
  int i = static_cast<int>(std::ceil(u - 0.5));
  int j = static_cast<int>(std::ceil(v - 0.5));
  if (i < 0) i = 0;
  if (j < 0) j = 0;
  if (i >= g.nx) i = g.nx - 1;
  if (j >= g.ny) j = g.ny - 1;
  return NearestNode{i, j, static_cast<std::size_t>(j) * g.nx + i};
}

inline bool contains(const CartesianGrid2D& g, Vec2 x) { return nearest_node(g, x).has_value(); }

/// Nearest-neighbor sampling. Throws std::out_of_range outside the expanded
/// bounding box; ray integrators check nearest_node() first and treat a miss
/// as a domain exit.
double sample_nearest(const ScalarField2D& field, Vec2 x);

struct SlownessSample {
  double eta = 0.0;  // s/m
  Vec2 grad{0.0, 0.0};  // s/m^2, central differences at the node (one-sided at edges)
};

SlownessSample slowness_and_gradient_at(const MediumModel& medium, const NearestNode& node);
SlownessSample slowness_and_gradient(const MediumModel& medium, Vec2 x);

/// Hessian of the sound speed at a node, [cxx, cxy, cyy], by second-order
/// differences (one-sided near edges).
std::array<double, 3> speed_hessian_at(const MediumModel& medium, const NearestNode& node);

struct Phantom {
  MediumModel medium;
  ScalarField2D u0;
};

/// Deterministic soft-tissue-like test scene: smooth heterogeneous sound
/// speed spanning exactly [1350, 1650] m/s and vessel-like initial pressure
/// strokes with values in {0} u (0, 1]. Geometry is defined in fractions of
/// the physical extent, so rescaled grids produce the same scene.
Phantom make_vessel_phantom(const CartesianGrid2D& grid);

/// Radially symmetric low-speed inclusion that focuses rays:
/// c(x) = c0 * (1 - contrast * exp(-|x - center|^2 / sigma^2)).
MediumModel make_lens_medium(const CartesianGrid2D& grid, double contrast, double c0 = 1500.0);

// HGF1 field file format: ASCII magic "HGF1\n", one ASCII header line
// "nx ny dx dy ox oy\n", then nx*ny IEEE-754 binary64 little-endian values,
// row-major, x fastest. Round-trips are bit exact.
void write_field(const std::string& path, const ScalarField2D& field);
ScalarField2D read_field(const std::string& path);

}  // namespace hg
