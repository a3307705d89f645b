#pragma once

#include <cmath>
#include <cstdint>

namespace percsolid {

struct WilsonInterval {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for k successes in n trials at z standard deviations.
inline WilsonInterval wilson_interval(int64_t k, int64_t n, double z) {
  WilsonInterval w;
  if (n <= 0) return w;
  const double p = double(k) / double(n);
  w.p_hat = p;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  w.lo = (center - spread) / denom;
  w.hi = (center + spread) / denom;
  if (w.lo < 0) w.lo = 0;
  if (w.hi > 1) w.hi = 1;
  return w;
}

}  // namespace percsolid
