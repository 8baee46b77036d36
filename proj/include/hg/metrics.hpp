#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hg {

inline double l2_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline double linf_norm(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

/// |a - b|_2 / |b|_2.
inline double rel_l2_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rel_l2_gap: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    num += d * d;
    den += b[k] * b[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double linf_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_gap: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

/// Pearson normalized cross-correlation.
inline double ncc(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("ncc: size mismatch");
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= a.size();
  mb /= b.size();
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - ma, db = b[k] - mb;
    num += da * db;
    va += da * da;
    vb += db * db;
  }
  const double den = std::sqrt(va) * std::sqrt(vb);
  return den > 0.0 ? num / den : 0.0;
}

/// Rescales to unit max magnitude (no-op for all-zero input).
inline std::vector<double> peak_normalized(std::vector<double> a) {
  const double peak = linf_norm(a);
  if (peak > 0.0)
    for (double& v : a) v /= peak;
  return a;
}

}  // namespace hg
