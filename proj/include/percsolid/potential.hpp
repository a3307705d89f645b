#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percsolid/cluster_graph.hpp"

namespace percsolid {

// Finite-volume Dirichlet setting: walk on g absorbed on `killed`. Solvers
// are matrix-free over the graph adjacency (neighbor-sum operator).
struct DirichletSystem {
  const ClusterGraph* g = nullptr;
  std::vector<uint8_t> killed;  // per vertex

  int64_t interior_count() const;
};

// killed = vertices on the outermost window layer
DirichletSystem window_killed_system(const ClusterGraph& g);
DirichletSystem no_kill_system(const ClusterGraph& g);

struct SolveStats {
  int iterations = 0;
  double residual_inf = 0.0;  // true residual, checked after the solve
};

// h = 1 on target, 0 on killed, harmonic elsewhere; residual <= 1e-12.
std::vector<double> hit_prob_exact(const DirichletSystem& sys, const std::vector<uint8_t>& target,
                                   SolveStats* stats = nullptr);

// column g(., y) of the Green kernel (time normalization, q_t integral);
// requires a nonempty killed set.
std::vector<double> green_column(const DirichletSystem& sys, int32_t y, SolveStats* stats = nullptr);

// dense Green kernel for small systems (interior <= dense_cap)
std::vector<std::vector<double>> green_dense(const DirichletSystem& sys, int64_t dense_cap = 4000);

struct EquilibriumResult {
  std::vector<int32_t> support;  // vertices of A
  std::vector<double> e_A;       // equilibrium measure on support
  double capacity = 0.0;
  std::vector<double> hit_prob;  // P_x[H_A < kill] for every vertex
};

EquilibriumResult equilibrium_and_capacity(const DirichletSystem& sys,
                                           const std::vector<uint8_t>& a_mask);

// max_x |h(x) - sum_y g(x,y) e_A(y)| over probe vertices
double last_exit_residual(const DirichletSystem& sys, const EquilibriumResult& eq,
                          const std::vector<int32_t>& probes);

// q_t(x, .) by uniformization, truncation error <= tol. No killing.
std::vector<double> heat_kernel(const ClusterGraph& g, double t, int32_t x, double tol = 1e-12);

// kernel of the walk absorbed outside U
std::vector<double> killed_heat_kernel(const ClusterGraph& g, const std::vector<uint8_t>& u_mask,
                                       double t, int32_t x, double tol = 1e-12);

struct EnvelopeFit {
  double c_lower = 0.0, a_lower = 0.0;  // log q >= a - (d/2) log t - c u, u = |x-y|_1^2/t
  double c_upper = 0.0, a_upper = 0.0;
  int violations = 0;
  int points = 0;
};

struct KernelSample {
  double t = 0.0;
  double l1 = 0.0;
  double q = 0.0;
};

EnvelopeFit gaussian_envelope_fit(const std::vector<KernelSample>& samples, int dim);

}  // namespace percsolid
