#include "seistomo/helmholtz_solver.hpp"

#include <cmath>

namespace seistomo {

HelmholtzSolver::HelmholtzSolver(std::shared_ptr<const HelmholtzProblem> problem,
                                 HelmholtzSolveOptions opts)
    : problem_(std::move(problem)), opts_(opts) {
  const std::int64_t n = problem_->grid().num_nodes();
  if (opts_.method == HelmholtzMethod::DenseLuSmall) {
    if (n > opts_.dense_threshold)
      throw ValidationError("dense_lu_small: grid has " + std::to_string(n) +
                            " nodes, above the threshold " + std::to_string(opts_.dense_threshold));
    dense_lu_ = std::make_shared<DenseMat<cplx>>(problem_->to_csr(0.0).to_dense());
    dense_piv_ = std::make_shared<std::vector<std::int64_t>>();
    lu_factor(*dense_lu_, *dense_piv_);
  } else {
    switch (opts_.method) {
      case HelmholtzMethod::MgBicgstab:
      case HelmholtzMethod::MgFgmresW:
        opts_.cycle.kind = CycleKind::W;
        break;
      case HelmholtzMethod::MgFgmresK:
        opts_.cycle.kind = CycleKind::K;
        break;
      default:
        break;
    }
    hier_ = std::make_shared<MgHierarchy<cplx>>(
        build_hierarchy(*problem_, opts_.nlevels, opts_.shift_factor));
  }
}

std::pair<BlockVec<cplx>, SolveReport> HelmholtzSolver::solve_block(const BlockVec<cplx>& B) const {
  if (B.n != problem_->grid().num_nodes())
    throw ValidationError("helmholtz solve: rhs size does not match grid");
  if (opts_.method == HelmholtzMethod::DenseLuSmall) {
    DenseMat<cplx> rhs(B.n, B.k);
    for (std::int64_t i = 0; i < B.n; ++i)
      for (int j = 0; j < B.k; ++j) rhs(i, j) = B(i, j);
    lu_solve(*dense_lu_, *dense_piv_, rhs);
    BlockVec<cplx> X(B.n, B.k);
    for (std::int64_t i = 0; i < B.n; ++i)
      for (int j = 0; j < B.k; ++j) X(i, j) = rhs(i, j);
    SolveReport rep;
    BlockVec<cplx> R(B.n, B.k);
    problem_->apply_block(X, R);
    axpby(R, cplx{-1.0}, B, cplx{1.0});
    auto rn = col_norms(R);
    auto bn = col_norms(B);
    rep.col_cycles.assign(B.k, 0);
    for (int j = 0; j < B.k; ++j) {
      const double b = bn[j] > 0 ? bn[j] : 1.0;
      rep.rel_residual.push_back(rn[j] / b);
      rep.converged.push_back(1);
    }
    return {std::move(X), std::move(rep)};
  }
  BlockOperator op;
  op.n = B.n;
  op.apply = [this](const BlockVec<cplx>& v, BlockVec<cplx>& out) {
    problem_->apply_block(v, out);
  };
  op.prec = [this](const BlockVec<cplx>& v, BlockVec<cplx>& out) {
    out = BlockVec<cplx>(v.n, v.k);
    hier_->cycle(opts_.cycle, v, out);
  };
  if (opts_.method == HelmholtzMethod::MgBicgstab)
    return block_bicgstab(op, B, opts_.tol, opts_.max_cycles);
  return block_fgmres(op, B, opts_.fgmres_restart, opts_.tol, opts_.max_cycles, true);
}

std::pair<CField, SolveReport> HelmholtzSolver::solve(const CField& rhs) const {
  BlockVec<cplx> B(static_cast<std::int64_t>(rhs.size()), 1);
  B.set_col(0, rhs);
  auto [X, rep] = solve_block(B);
  return {X.col(0), std::move(rep)};
}

WavefieldBatch solve_helmholtz(const HelmholtzSolver& solver, const std::vector<CField>& rhs,
                               StoragePrecision precision, SolveReport* report) {
  const std::int64_t n = solver.problem().grid().num_nodes();
  BlockVec<cplx> B(n, static_cast<int>(rhs.size()));
  for (std::size_t s = 0; s < rhs.size(); ++s) B.set_col(static_cast<int>(s), rhs[s]);
  auto [X, rep] = solver.solve_block(B);
  if (!rep.all_converged())
    throw ConvergenceError("helmholtz solve: tolerance not met within cycle cap", rep.history);
  WavefieldBatch batch(solver.problem().grid(), precision);
  for (std::size_t s = 0; s < rhs.size(); ++s) batch.append(static_cast<int>(s), X.col(static_cast<int>(s)));
  if (report) *report = rep;
  return batch;
}

CField fwi_sensitivity_rhs(const HelmholtzProblem& problem, const CField& u_s, const Field& v) {
  const double w2 = problem.omega() * problem.omega();
  const CField& gf = problem.gamma_factor();
  CField rhs(u_s.size());
  for (std::size_t i = 0; i < u_s.size(); ++i) rhs[i] = -w2 * gf[i] * u_s[i] * v[i];
  return rhs;
}

Field fwi_sensitivity_output(const HelmholtzProblem& problem, const CField& u_s,
                             const CField& lambda) {
  const double w2 = problem.omega() * problem.omega();
  const CField& gf = problem.gamma_factor();
  Field g(u_s.size());
  for (std::size_t i = 0; i < u_s.size(); ++i)
    g[i] = std::real(-w2 * gf[i] * u_s[i] * lambda[i]);
  return g;
}

std::vector<cplx> fwi_jacobian_vec(const HelmholtzSolver& solver, const CField& u_s,
                                   const SamplingOperator& P, const Field& v) {
  const HelmholtzProblem& prob = solver.problem();
  if (u_s.size() != static_cast<std::size_t>(prob.grid().num_nodes()))
    throw StateError("fwi_jacobian_vec: stored field does not match grid");
  if (v.size() != u_s.size()) throw ValidationError("fwi_jacobian_vec: model vector size mismatch");
  const CField rhs = fwi_sensitivity_rhs(prob, u_s, v);
  auto [w_field, rep] = solver.solve(rhs);
  if (!rep.all_converged())
    throw ConvergenceError("fwi_jacobian_vec: sensitivity solve did not converge", rep.history);
  return P.sample(w_field);
}

Field fwi_jacobian_transpose_vec(const HelmholtzSolver& solver, const CField& u_s,
                                 const SamplingOperator& P, const std::vector<cplx>& w) {
  const HelmholtzProblem& prob = solver.problem();
  if (u_s.size() != static_cast<std::size_t>(prob.grid().num_nodes()))
    throw StateError("fwi_jacobian_transpose_vec: stored field does not match grid");
  std::vector<cplx> wc(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) wc[i] = std::conj(w[i]);
  const CField rhs = P.sample_adjoint(wc);
  auto [lambda, rep] = solver.solve(rhs);
  if (!rep.all_converged())
    throw ConvergenceError("fwi_jacobian_transpose_vec: adjoint solve did not converge",
                           rep.history);
  return fwi_sensitivity_output(prob, u_s, lambda);
}

}  // namespace seistomo
