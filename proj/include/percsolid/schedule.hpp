#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace percsolid {

struct Fraction {
  long long num = 0;
  long long den = 1;
};

// alpha(J) = (1/2) [1 - 2 / ((10/9)^{1/J} + 1)], delta(J) = alpha(J)/4
long double alpha_of_J(int J);
long double delta_of_J(int J);
Fraction alpha_rational_j1();  // {1, 38}

// ((1+alpha)/(1-alpha))^J < 10/9
bool alpha_ratio_check(int J);

// delta' = eta * delta / (6 d)
long double delta_prime(long double delta, double eta_hat, int dim);

// smallest integer L >= 5 with c0 * 2^{-L} <= delta(J)
int L_of_J(int J, long double c0);

long double c0_constant(int dim, double eta_hat);      // 3 d 2^{d-1} / eta
long double c_lip_at(int ell, double eta_hat);         // 6 2^{-ell} / eta

struct Interval {
  long double lo = 0.0L;
  long double hi = 0.0L;
};

// I_j = [ (3/4) q^{-j} - (1+alpha)/4, (3/4) q^{j} - (1-alpha)/4 ], q=(1+a)/(1-a)
std::vector<Interval> intervals(int J);

long double alpha_tilde(int dim);  // (3/10) 4^{-d}

// natural-log values; I0(eps,k) = [c3 (k 2^k / eps) log(k 2^k / eps)]^{2^{k-1}}
long double log_I0(double eps, int k, double c2_at_1);

struct IOfJ {
  long double log_value = 0.0L;
  int branch = 0;  // 0: ceil I0 term, 1: ceil(J/c2)^{2^{J-1}} term
};
IOfJ I_of_J(int J, const std::function<double(int)>& c2);

// log of the recursive upper bound on Gamma~_k(I'); -inf for k == 1, 0 for I' <= 0.
// clipped_to_one reports whether the bound exceeded 1 and was clipped.
long double log_gamma_tilde(int k, long double i_prime, double c2, bool* clipped_to_one = nullptr);

struct LambertReport {
  double u = 0.0;
  double w_lo = 0.0, w_hi = 0.0;  // certified bracket for W_{-1}(-e^{-u-1})
  double bound = 0.0;             // -1 - sqrt(2u) - u
  double margin = 0.0;            // w_lo - bound
  bool ok = false;
};
LambertReport lambert_w_check(double u);

struct AlternativesResult {
  double mu = 0.0;
  double tail_hi = 0.0, tail_lo = 0.0, central = 0.0;
  bool first_alternative = false;
  bool second_alternative = false;
  bool ok = false;
};
AlternativesResult elementary_lemma_check(std::span<const double> values,
                                          std::span<const double> weights, double delta);

// r_{alpha,R} = exp(kappa_reg (log R)^{1+Delta_S})
long double r_alpha_R(double kappa_reg, long double R, double delta_s);

struct SchedulePieces {
  int64_t ell0 = 0;
  std::vector<int64_t> a_star;  // L-multiples in (ell0 - I(J+1)L, ell0]
  std::vector<int64_t> a_set;   // (J+1)L-multiples in the same range
};
SchedulePieces ell0_and_A(int64_t ell_star, int64_t I, int J, int64_t L);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// ell_j >= ell_{j+1} + L and 2^{ell_j} < r_{alpha(J), 2^{ell_{j+1}}} - 2^{ell_{j+1}}
CheckReport proper_separation_check(std::span<const int64_t> ells, int J, int64_t L,
                                    double kappa_reg, double delta_s);

int64_t ell_min(long double delta, double eta_hat, long double R_den, long double R_hk,
                long double R_khk);

// ell0 - (I+1)(J+1)L > ell_min  and  r_{alpha(J), 2^{ell0-(I+1)(J+1)L}} - 4*2^{ell0} >= b_N
CheckReport compatibility_check(int64_t ell_star, int64_t I, int J, int64_t L, long double ell_min,
                                double kappa_reg, double delta_s, long double b_N);

struct GrowthPair {
  std::vector<double> N;    // sample points
  std::vector<double> a_N;
  std::vector<double> b_N;
  double delta_s = 1.0;
};
CheckReport growth_check(const GrowthPair& gp);

// Full parameter bundle for one choice of J (desk-scale overrides allowed).
struct ScaleSchedule {
  int J = 1;
  int dim = 3;
  double eta_hat = 0.0;
  long double alpha = 0.0L;
  long double delta = 0.0L;
  long double delta_p = 0.0L;  // delta'(delta)
  long double c0 = 0.0L;
  int L = 5;                  // L(J), or an explicit override
  bool L_overridden = false;
  long double alpha_t = 0.0L;  // alpha~(d)
  std::vector<Interval> I_j;
  long double log_I = 0.0L;    // log I(J) under the assumed c2
  int I_branch = 0;
  double c2_assumed = 0.5;
  int64_t ell_star = 0;
  int64_t I_count = 0;         // desk-scale I actually used for A*/A
  SchedulePieces pieces;
};

ScaleSchedule make_schedule(int J, int dim, double eta_hat, int64_t ell_star, double c2_assumed,
                            int64_t I_override = 0, int L_override = 0);

}  // namespace percsolid
