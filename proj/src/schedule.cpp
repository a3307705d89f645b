#include "percsolid/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace percsolid {

long double alpha_of_J(int J) {
  if (J < 1) throw std::invalid_argument("alpha_of_J: J must be >= 1");
  const long double q = std::pow(10.0L / 9.0L, 1.0L / J);
  return 0.5L * (1.0L - 2.0L / (q + 1.0L));
}

long double delta_of_J(int J) { return alpha_of_J(J) / 4.0L; }

Fraction alpha_rational_j1() {
  // (10/9)^{1/1} + 1 = 19/9; 1 - 2*(9/19) = 1/19; half of that is 1/38
  return Fraction{1, 38};
}

bool alpha_ratio_check(int J) {
  const long double a = alpha_of_J(J);
  const long double ratio = std::pow((1.0L + a) / (1.0L - a), (long double)J);
  return ratio < 10.0L / 9.0L;
}

long double delta_prime(long double delta, double eta_hat, int dim) {
  return (long double)eta_hat * delta / (6.0L * dim);
}

int L_of_J(int J, long double c0) {
  if (c0 <= 0) throw std::invalid_argument("L_of_J: c0 must be positive");
  const long double delta = delta_of_J(J);
  int L = 5;
  while (c0 * std::pow(2.0L, (long double)-L) > delta) {
    ++L;
    if (L > 4096) throw std::runtime_error("L_of_J: no feasible L");
  }
  return L;
}

long double c0_constant(int dim, double eta_hat) {
  return 3.0L * dim * std::pow(2.0L, (long double)(dim - 1)) / eta_hat;
}

long double c_lip_at(int ell, double eta_hat) {
  return 6.0L * std::pow(2.0L, (long double)-ell) / eta_hat;
}

std::vector<Interval> intervals(int J) {
  const long double a = alpha_of_J(J);
  const long double q = (1.0L + a) / (1.0L - a);
  std::vector<Interval> out(static_cast<size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) {
    out[j].lo = 0.75L * std::pow(1.0L / q, (long double)j) - (1.0L + a) / 4.0L;
    out[j].hi = 0.75L * std::pow(q, (long double)j) - (1.0L - a) / 4.0L;
  }
  return out;
}

long double alpha_tilde(int dim) {
  if (dim < 2) throw std::invalid_argument("alpha_tilde: dim must be >= 2");
  return 0.3L * std::pow(4.0L, (long double)-dim);
}

long double log_I0(double eps, int k, double c2_at_1) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("log_I0: eps must lie in (0,1)");
  if (k < 2) throw std::invalid_argument("log_I0: k must be >= 2");
  if (!(c2_at_1 > 0.0 && c2_at_1 < 1.0)) throw std::invalid_argument("log_I0: c2(1) in (0,1)");
  const long double c3 = std::max<long double>(2.0L, -std::log1p((long double)-c2_at_1));
  const long double base = (long double)k * std::pow(2.0L, (long double)k) / eps;
  return std::pow(2.0L, (long double)(k - 1)) * std::log(c3 * base * std::log(base));
}

IOfJ I_of_J(int J, const std::function<double(int)>& c2) {
  if (J < 2) throw std::invalid_argument("I_of_J: J must be >= 2");
  const double c2J = c2(J);
  const double eps = -0.5 * std::log1p(-c2J);
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::domain_error("I_of_J: -log(1-c2(J))/2 must lie in (0,1) for the I0 branch");
  }
  long double log_first = log_I0(eps, J, c2(1));
  // apply the outer ceiling when the value is small enough to represent
  if (log_first < std::log(1e18L)) {
    log_first = std::log(std::ceil(std::exp(log_first)));
  }
  const long double ratio = std::ceil((long double)J / c2J);
  const long double log_second = std::pow(2.0L, (long double)(J - 1)) * std::log(ratio);
  IOfJ out;
  if (log_first >= log_second) {
    out.log_value = log_first;
    out.branch = 0;
  } else {
    out.log_value = log_second;
    out.branch = 1;
  }
  return out;
}

long double log_gamma_tilde(int k, long double i_prime, double c2, bool* clipped_to_one) {
  if (clipped_to_one) *clipped_to_one = false;
  if (i_prime <= 0.0L) return 0.0L;                                   // bound 1
  if (k <= 1) return -std::numeric_limits<long double>::infinity();  // Gamma~_1 = 0
  const long double log_1mc2 = std::log1p((long double)-c2);
  const long double a = (std::sqrt(i_prime) - 1.0L) * log_1mc2;
  const long double delta = std::floor(std::sqrt(i_prime));
  bool child_clipped = false;
  const long double child = log_gamma_tilde(k - 1, delta - (k - 1) + 1.0L, c2, &child_clipped);
  long double out;
  if (std::isinf(child) && child < 0) {
    out = a;
  } else {
    const long double b = (1.0L + (long double)(k - 2) / 2.0L) * std::log(i_prime) + child;
    const long double m = std::max(a, b);
    out = m + std::log(std::exp(a - m) + std::exp(b - m));
  }
  if (out > 0.0L) {
    if (clipped_to_one) *clipped_to_one = true;
    out = 0.0L;
  }
  if (clipped_to_one && child_clipped) *clipped_to_one = true;
  return out;
}

LambertReport lambert_w_check(double u) {
  if (!(u > 0)) throw std::invalid_argument("lambert_w_check: u must be positive");
  LambertReport rep;
  rep.u = u;
  rep.bound = -1.0 - std::sqrt(2.0 * u) - u;
  // solve log(-w) + w = -u-1 on w <= -1; h is increasing in w there
  auto h = [&](double w) { return std::log(-w) + w + u + 1.0; };
  double hi = -1.0;            // h(-1) = u > 0
  double lo = rep.bound - 1.0;  // beyond the known lower bound
  while (h(lo) > 0) lo = 2.0 * lo;  // defensive, should not trigger
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, -lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) > 0) hi = mid;
    else lo = mid;
  }
  rep.w_lo = lo;
  rep.w_hi = hi;
  rep.margin = lo - rep.bound;
  rep.ok = rep.margin > 0;
  return rep;
}

AlternativesResult elementary_lemma_check(std::span<const double> values,
                                          std::span<const double> weights, double delta) {
  if (values.size() != weights.size() || values.empty()) {
    throw std::invalid_argument("elementary_lemma_check: values/weights mismatch");
  }
  AlternativesResult res;
  double total = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || values[i] > 1.0 || weights[i] < 0.0) {
      throw std::invalid_argument("elementary_lemma_check: values in [0,1], weights >= 0");
    }
    total += weights[i];
    res.mu += weights[i] * values[i];
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("elementary_lemma_check: weights must sum to 1");
  }
  if (delta < 0.0 || delta > std::min(res.mu, 1.0 - res.mu)) {
    throw std::invalid_argument("elementary_lemma_check: delta out of [0, mu ^ (1-mu)]");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] > res.mu + delta) res.tail_hi += weights[i];
    else if (values[i] < res.mu - delta) res.tail_lo += weights[i];
    else res.central += weights[i];
  }
  res.first_alternative = res.tail_hi >= delta / 2.0 - 1e-15 && res.tail_lo >= delta / 2.0 - 1e-15;
  res.second_alternative = res.central >= 0.25 - delta / 2.0 - 1e-15;
  res.ok = res.first_alternative || res.second_alternative;
  return res;
}

long double r_alpha_R(double kappa_reg, long double R, double delta_s) {
  if (R < 1.0L) throw std::invalid_argument("r_alpha_R: R must be >= 1");
  return std::exp((long double)kappa_reg * std::pow(std::log(R), 1.0L + (long double)delta_s));
}

SchedulePieces ell0_and_A(int64_t ell_star, int64_t I, int J, int64_t L) {
  if (ell_star < 0 || I < 1 || J < 1 || L < 1) {
    throw std::invalid_argument("ell0_and_A: parameters out of range");
  }
  SchedulePieces out;
  const int64_t block = (int64_t(J) + 1) * L;
  out.ell0 = (ell_star / block) * block;
  const int64_t low = out.ell0 - I * block;  // exclusive
  for (int64_t ell = out.ell0; ell > low && ell >= 0; ell -= L) out.a_star.push_back(ell);
  for (int64_t ell = out.ell0; ell > low && ell >= 0; ell -= block) out.a_set.push_back(ell);
  std::reverse(out.a_star.begin(), out.a_star.end());
  std::reverse(out.a_set.begin(), out.a_set.end());
  return out;
}

CheckReport proper_separation_check(std::span<const int64_t> ells, int J, int64_t L,
                                    double kappa_reg, double delta_s) {
  CheckReport rep;
  const long double a = alpha_of_J(J);
  (void)a;
  for (size_t j = 0; j + 1 < ells.size(); ++j) {
    if (ells[j] < ells[j + 1] + L) {
      rep.ok = false;
      rep.violations.push_back("gap ell_" + std::to_string(j) + " < ell_" + std::to_string(j + 1) +
                               " + L");
    }
    const long double r = r_alpha_R(kappa_reg, std::pow(2.0L, (long double)ells[j + 1]), delta_s);
    const long double lhs = std::pow(2.0L, (long double)ells[j]);
    if (!(lhs < r - std::pow(2.0L, (long double)ells[j + 1]))) {
      rep.ok = false;
      rep.violations.push_back("2^ell_" + std::to_string(j) + " >= r_{alpha,2^ell_" +
                               std::to_string(j + 1) + "} - 2^ell_" + std::to_string(j + 1));
    }
  }
  return rep;
}

int64_t ell_min(long double delta, double eta_hat, long double R_den, long double R_hk,
                long double R_khk) {
  const auto clog2 = [](long double x) {
    return static_cast<int64_t>(std::ceil(std::log2(std::max(x, 1.0L))));
  };
  int64_t m = std::max({clog2(R_hk), clog2(R_khk), clog2(R_den)});
  const long double cap = std::min(delta / 8.0L, (long double)eta_hat / 6.0L * delta);
  int64_t ell = 0;
  while (std::pow(2.0L, (long double)-ell) > cap) {
    ++ell;
    if (ell > 16384) throw std::runtime_error("ell_min: threshold unreachable");
  }
  return std::max(m, ell);
}

CheckReport compatibility_check(int64_t ell_star, int64_t I, int J, int64_t L, long double lmin,
                                double kappa_reg, double delta_s, long double b_N) {
  CheckReport rep;
  const auto pieces = ell0_and_A(ell_star, I, J, L);
  const int64_t drop = (I + 1) * (int64_t(J) + 1) * L;
  const int64_t base = pieces.ell0 - drop;
  if (!(static_cast<long double>(base) > lmin)) {
    rep.ok = false;
    rep.violations.push_back("ell0 - (I+1)(J+1)L <= ell_min");
  }
  if (base < 0) {
    rep.ok = false;
    rep.violations.push_back("ell0 - (I+1)(J+1)L negative");
    return rep;
  }
  const long double r = r_alpha_R(kappa_reg, std::pow(2.0L, (long double)base), delta_s);
  if (!(r - 4.0L * std::pow(2.0L, (long double)pieces.ell0) >= b_N)) {
    rep.ok = false;
    rep.violations.push_back("r_{alpha,2^{ell0-(I+1)(J+1)L}} - 4*2^{ell0} < b_N");
  }
  return rep;
}

CheckReport growth_check(const GrowthPair& gp) {
  CheckReport rep;
  const size_t n = gp.N.size();
  if (gp.a_N.size() != n || gp.b_N.size() != n || n < 2) {
    throw std::invalid_argument("growth_check: need matching sample arrays of length >= 2");
  }
  auto increasing = [&](const std::function<double(size_t)>& f, const char* name) {
    for (size_t i = 0; i + 1 < n; ++i) {
      if (!(f(i + 1) > f(i))) {
        rep.ok = false;
        rep.violations.push_back(std::string(name) + " not increasing at sample " +
                                 std::to_string(i + 1));
        return;
      }
    }
  };
  increasing([&](size_t i) { return gp.a_N[i]; }, "a_N");
  increasing([&](size_t i) { return gp.b_N[i]; }, "b_N");
  increasing([&](size_t i) { return gp.b_N[i] / gp.a_N[i]; }, "b_N/a_N");
  increasing(
      [&](size_t i) {
        return gp.a_N[i] / std::exp(std::pow(std::log(gp.b_N[i]), 1.0 / (1.0 + gp.delta_s / 2.0)));
      },
      "a_N/exp{(log b_N)^{1/(1+Delta_S/2)}}");
  return rep;
}

ScaleSchedule make_schedule(int J, int dim, double eta_hat, int64_t ell_star, double c2_assumed,
                            int64_t I_override, int L_override) {
  if (J < 1) throw std::invalid_argument("make_schedule: J must be >= 1");
  if (dim < 2) throw std::invalid_argument("make_schedule: dim must be >= 2");
  if (!(eta_hat > 0.0 && eta_hat <= 1.0)) {
    throw std::invalid_argument("make_schedule: eta_hat must lie in (0,1]");
  }
  ScaleSchedule s;
  s.J = J;
  s.dim = dim;
  s.eta_hat = eta_hat;
  s.alpha = alpha_of_J(J);
  s.delta = delta_of_J(J);
  s.delta_p = delta_prime(s.delta, eta_hat, dim);
  s.c0 = c0_constant(dim, eta_hat);
  s.L = L_override > 0 ? L_override : L_of_J(J, s.c0);
  s.L_overridden = L_override > 0;
  s.alpha_t = alpha_tilde(dim);
  s.I_j = intervals(J);
  s.c2_assumed = c2_assumed;
  if (J >= 2) {
    const auto i = I_of_J(J, [c2_assumed](int) { return c2_assumed; });
    s.log_I = i.log_value;
    s.I_branch = i.branch;
  } else {
    s.log_I = 0.0L;
    s.I_branch = -1;
  }
  s.ell_star = ell_star;
  if (I_override > 0) {
    s.I_count = I_override;
  } else if (s.log_I < std::log(1e6L) && J >= 2) {
    s.I_count = static_cast<int64_t>(std::ceil(std::exp(s.log_I)));
  } else {
    s.I_count = 1;
  }
  s.pieces = ell0_and_A(ell_star, s.I_count, J, s.L);
  return s;
}

}  // namespace percsolid
