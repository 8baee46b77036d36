#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

namespace hg {

enum class DeltaKind { dirichlet, gaussian };

/// Strong representation of the Dirac delta with regularization width eps
/// (seconds). Dirichlet: sin(t/eps)/(pi t). Gaussian: exp(-t^2/eps^2)/(eps sqrt(pi)).
struct DeltaRep {
  DeltaKind kind = DeltaKind::gaussian;
  double eps = 0.0;
};

struct DeltaValue {
  double value = 0.0;       // 1/s
  double derivative = 0.0;  // 1/s^2
};

DeltaValue delta_rep(const DeltaRep& rep, double t);

/// Free-space 2D Green's function (c/2pi) H(ct - r)/sqrt(c^2 t^2 - r^2) with
/// the wavefront singularity mollified in time by the delta representation.
/// Far behind the front the exact formula is returned; the value is zero
/// ahead of the mollified front.
double g0_2d(double c, double t, double r, const DeltaRep& rep);

/// Time derivative of the mollified 2D Green's function.
double g0_2d_dt(double c, double t, double r, const DeltaRep& rep);

/// 3D Green's function rep(c t - r) * c / (4 pi r); evaluation only, no 3D
/// solver. Throws std::domain_error at r == 0.
double g0_3d(double c, double t, double r, const DeltaRep& rep);

/// Mollified wavefront profile: the delta representation convolved with the
/// universal front H(s) s^{-1/2}, and its derivative. The rung kernels are
/// this profile scaled per sound speed.
double front_profile(double s, const DeltaRep& rep);
double front_profile_dt(double s, const DeltaRep& rep);

/// Precomputed dG0/dt time series for a ladder of sound speeds
/// c_i = cMin + i * deltaC. Each rung holds nt samples on the exact dt grid,
/// sample i at time (i - timeZero) * dt, so convolutions stay sample-exact.
/// The alignment picks timeZero so the kernel maximum lands at the preroll
/// index, i.e. at t = 0 up to half a sample; preroll = ceil(5 eps / dt)
/// keeps everything ahead of the causal floor at -5 eps.
struct GreensTable {
  double cMin = 0.0;
  double deltaC = 0.0;
  double dt = 0.0;
  int nt = 0;
  int preroll = 0;
  int timeZero = 0;
  DeltaRep rep;
  std::vector<std::vector<double>> series;  // one kernel per rung

  int rungCount() const { return static_cast<int>(series.size()); }
  double cValue(int i) const { return cMin + deltaC * i; }
  long clampWarnings() const { return clampCount_ ? clampCount_->load() : 0; }

  std::shared_ptr<std::atomic<long>> clampCount_ = std::make_shared<std::atomic<long>>(0);
};

GreensTable build_g0_table(double cMin, double cMax, double deltaC, double dt, int nt,
                           const DeltaRep& rep);

/// Nearest rung by |c - c_i|, ties to the lower index; out-of-ladder speeds
/// clamp and bump the table's warning count.
int lookup_g0_index(const GreensTable& table, double c);
const std::vector<double>& lookup_g0(const GreensTable& table, double c);

// HGT1 cache format: ASCII magic "HGT1\n", one ASCII header line
// "I dt nt epsKind eps cMin deltaC\n", then (I+1)*nt binary64 LE values.
void write_table(const std::string& path, const GreensTable& table);
GreensTable read_table(const std::string& path);

}  // namespace hg
