// Fully discrete scheme: BDF-q in time on the moving mesh, with the mass term
// summed over the q+1 most recent meshes and the operator assembled on the
// current one. Startup values come from a ladder of lower-order BDF steps.
#pragma once

#include "movefem/assembly.hpp"
#include "movefem/flow.hpp"
#include "movefem/linear_solver.hpp"

#include <deque>
#include <map>

namespace movefem {

struct BDFConfig {
  int q = 1;
  double tau = 0.1;
  double T = 1.0;

  int steps() const {
    const double m = T / tau;
    const double rounded = std::llround(m);
    if (std::abs(m - rounded) > 1e-12 * std::max(1.0, m))
      throw Error("BDFConfig: T/tau is not an integer");
    if (q < 1 || q > 4) throw Error("BDFConfig: BDF order must be in [1,4]");
    return static_cast<int>(rounded);
  }
};

enum class VelocityMode { BDF, Interpolated };

// Everything a time step needs, bundled once per run.
template <int dim>
struct TimeProblem {
  const FESpace<dim>* space = nullptr;
  const MeshTrajectory<dim>* trajectory = nullptr;
  const LevelSetGeometry<dim>* geom = nullptr;
  const FlowMap<dim>* flow = nullptr;
  CoefficientField<dim> coeffs;
  DataMode data_mode = DataMode::Interpolated;
  VelocityMode velocity_mode = VelocityMode::BDF;
  SolverConfig solver;
  int quad_degree = -1;
};

// Solution history: coefficient vectors and the mass matrices of the meshes
// they live on, indexed by step. Old entries are pruned once out of the BDF
// window.
template <int dim>
struct SolutionHistory {
  std::map<int, Vector> U;
  std::map<int, CsrMatrix> mass;
  int last_step = -1;

  void prune(int keep_from) {
    while (!U.empty() && U.begin()->first < keep_from) U.erase(U.begin());
    while (!mass.empty() && mass.begin()->first < keep_from) mass.erase(mass.begin());
  }
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  int solver_iterations = 0;
  double solver_residual = 0.0;
  double min_det = 0.0;
  double mass_norm = 0.0;  // ||U||_{M(t_j)}
};

// One BDF step of order m at step index j (j >= m), using history entries
// j-m..j-1. Appends U^j and M^j to the history.
template <int dim>
StepDiagnostics bdf_step(const TimeProblem<dim>& prob, SolutionHistory<dim>& hist, int m, int j) {
  const auto& traj = *prob.trajectory;
  const double tau = traj.times[1] - traj.times[0];
  const auto frame = traj.frame(j);
  auto delta = bdf_weights(m);

  CsrMatrix Mj = assemble_mass(*prob.space, frame, prob.quad_degree);

  NodalField<dim> vel;
  if (prob.velocity_mode == VelocityMode::BDF)
    vel = bdf_mesh_velocity(traj, j, m, tau);
  else
    vel = discrete_velocity(*traj.base, *prob.flow, frame.time);

  CsrMatrix Aj =
      assemble_operator(*prob.space, frame, prob.coeffs, &vel, prob.geom, prob.quad_degree);
  Vector rhs = assemble_load(*prob.space, frame, prob.coeffs, *prob.geom, prob.data_mode,
                             prob.quad_degree);
  for (int l = 1; l <= m; ++l) {
    const auto itU = hist.U.find(j - l);
    const auto itM = hist.mass.find(j - l);
    if (itU == hist.U.end() || itM == hist.mass.end())
      throw Error("bdf_step: missing history at step " + std::to_string(j - l));
    rhs -= (delta[l] / tau) * itM->second.apply(itU->second);
  }

  CsrMatrix S = csr_add(Mj, delta[0] / tau, Aj, 1.0);
  apply_dirichlet(S, rhs, *prob.space);

  SolveStats stats;
  Vector Uj = solve(S, rhs, prob.solver, &stats);

  StepDiagnostics diag;
  diag.step = j;
  diag.time = frame.time;
  diag.solver_iterations = stats.iterations;
  diag.solver_residual = stats.residual;
  diag.mass_norm = std::sqrt(std::max(0.0, Uj.dot(Mj.apply(Uj))));
  hist.U[j] = std::move(Uj);
  hist.mass[j] = std::move(Mj);
  hist.last_step = j;
  return diag;
}

// Standard step of the configured order.
template <int dim>
StepDiagnostics step(const TimeProblem<dim>& prob, SolutionHistory<dim>& hist, int q, int j) {
  if (j < q) throw Error("step: j must be at least the BDF order");
  return bdf_step(prob, hist, q, j);
}

// Compute U^1 .. U^{q-1} by one step each of BDF order 1 .. q-1.
template <int dim>
std::vector<StepDiagnostics> startup(const TimeProblem<dim>& prob, SolutionHistory<dim>& hist,
                                     int q) {
  std::vector<StepDiagnostics> diags;
  for (int m = 1; m < q; ++m) diags.push_back(bdf_step(prob, hist, m, m));
  return diags;
}

template <int dim>
struct RunResult {
  Vector U_final;
  std::vector<StepDiagnostics> diagnostics;
};

// Full integration: U^0 = initial coefficients, startup ladder, then BDF-q up
// to the final step.
template <int dim>
RunResult<dim> run(const TimeProblem<dim>& prob, const BDFConfig& cfg, Vector U0) {
  const int M = cfg.steps();
  if (M < cfg.q) throw Error("run: need at least q steps (T/tau >= q)");
  SolutionHistory<dim> hist;
  {
    auto frame0 = prob.trajectory->frame(0);
    hist.mass[0] = assemble_mass(*prob.space, frame0, prob.quad_degree);
    hist.U[0] = std::move(U0);
    hist.last_step = 0;
  }
  RunResult<dim> result;
  for (auto& d : startup(prob, hist, cfg.q)) result.diagnostics.push_back(d);
  for (int j = cfg.q; j <= M; ++j) {
    result.diagnostics.push_back(bdf_step(prob, hist, cfg.q, j));
    hist.prune(j - cfg.q);
  }
  result.U_final = hist.U.at(M);
  return result;
}

}  // namespace movefem
