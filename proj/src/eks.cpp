#include "morkit/eks.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "morkit/errors.hpp"

namespace morkit {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Block Gram-Schmidt with one full re-orthogonalization pass. Columns whose
// post-orthogonalization norm falls below deflation_tol times their original
// norm are dropped.
MatrixXd orthonormalize_against(const MatrixXd& W, const MatrixXd& K,
                                double deflation_tol) {
  const Index n = W.rows();
  MatrixXd accepted(n, W.cols());
  Index kept = 0;
  for (Index c = 0; c < W.cols(); ++c) {
    VectorXd w = W.col(c);
    const double norm0 = w.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (K.cols() > 0) w.noalias() -= K * (K.transpose() * w);
      if (kept > 0)
        w.noalias() -=
            accepted.leftCols(kept) * (accepted.leftCols(kept).transpose() * w);
    }
    const double norm1 = w.norm();
    if (norm1 < deflation_tol * norm0) continue;
    accepted.col(kept++) = w / norm1;
  }
  return accepted.leftCols(kept);
}

}  // namespace

EksState eks_init(const LyapunovProblem& problem, const EksOptions& opts) {
  if (opts.maxiter <= 0 || opts.tol <= 0.0 || opts.deflation_tol <= 0.0)
    throw Error("EKS options must all be positive");

  EksState state;
  state.opts = opts;
  state.factor_map = [problem](const MatrixXd& z) {
    return problem.map_factor(z);
  };
  const MatrixXd& F = problem.rhs();

  MatrixXd q_fwd = orthonormalize_against(F, MatrixXd(problem.order(), 0),
                                          opts.deflation_tol);
  MatrixXd w_inv = problem.apply_inverse(F);
  MatrixXd q_inv = orthonormalize_against(w_inv, q_fwd, opts.deflation_tol);

  const Index s = q_fwd.cols() + q_inv.cols();
  state.K.resize(problem.order(), s);
  state.K << q_fwd, q_inv;
  state.AK = problem.apply(state.K);
  state.fwd_begin = 0;
  state.fwd_count = q_fwd.cols();
  state.inv_begin = q_fwd.cols();
  state.inv_count = q_inv.cols();
  state.j = 1;
  state.stagnated = (s == 0);
  return state;
}

void eks_expand(EksState& state, const LyapunovProblem& problem) {
  if (state.fwd_count + state.inv_count == 0)
    throw NumericalError(
        "EKS basis growth exhausted: the previous block was fully deflated");

  // A was already applied to the forward half when it entered the basis.
  MatrixXd w_fwd = state.AK.middleCols(state.fwd_begin, state.fwd_count);
  MatrixXd q_fwd = orthonormalize_against(w_fwd, state.K, state.opts.deflation_tol);

  MatrixXd w_inv = problem.apply_inverse(
      state.K.middleCols(state.inv_begin, state.inv_count));
  MatrixXd k_plus(state.K.rows(), state.K.cols() + q_fwd.cols());
  k_plus << state.K, q_fwd;
  MatrixXd q_inv = orthonormalize_against(w_inv, k_plus, state.opts.deflation_tol);

  const Index old = state.K.cols();
  const Index added = q_fwd.cols() + q_inv.cols();
  MatrixXd K_new(state.K.rows(), old + added);
  K_new << state.K, q_fwd, q_inv;
  MatrixXd AK_new(state.K.rows(), old + added);
  AK_new.leftCols(old) = state.AK;
  if (q_fwd.cols() > 0) AK_new.middleCols(old, q_fwd.cols()) = problem.apply(q_fwd);
  if (q_inv.cols() > 0)
    AK_new.middleCols(old + q_fwd.cols(), q_inv.cols()) = problem.apply(q_inv);

  state.K = std::move(K_new);
  state.AK = std::move(AK_new);
  state.fwd_begin = old;
  state.fwd_count = q_fwd.cols();
  state.inv_begin = old + q_fwd.cols();
  state.inv_count = q_inv.cols();
  state.j += 1;
  state.stagnated = (added == 0);
  state.has_solution = false;
}

void solve_projected(EksState& state, const LyapunovProblem& problem) {
  state.A_small.noalias() = state.K.transpose() * state.AK;
  state.R_small.noalias() = state.K.transpose() * problem.rhs();
  try {
    state.X_small = lyap_dense(state.A_small, state.R_small);
  } catch (const NumericalError& e) {
    throw NumericalError(
        std::string("projected system matrix lost stability: ") + e.what());
  }
  state.has_solution = true;
}

double residual_norm(const EksState& state, const LyapunovProblem& problem) {
  if (!state.has_solution) return 1.0;
  const MatrixXd& F = problem.rhs();
  const double denom = (F.transpose() * F).norm();  // == ||F F'||_F
  if (denom == 0.0) return 0.0;

  const Index s = state.K.cols();
  const Index k = F.cols();

  // [K, AK, F] = [K, Q2] * Tmap with Tmap = [I, coef; 0, R2]; the residual
  //   R = AK X K' + K X AK' + F F'
  // then has Frobenius norm ||Tmap M Tmap'||_F for the small coupling M.
  MatrixXd aug(state.K.rows(), s + k);
  aug << state.AK, F;
  MatrixXd coef(s, s + k);
  coef << state.A_small, state.R_small;

  MatrixXd E = aug - state.K * coef;
  E.noalias() -= state.K * (state.K.transpose() * E);  // re-orthogonalize
  Eigen::HouseholderQR<MatrixXd> qr(E);
  MatrixXd R2 = qr.matrixQR()
                    .topRows(std::min<Index>(s + k, E.rows()))
                    .triangularView<Eigen::Upper>();
  const Index t = R2.rows();

  MatrixXd Tmap = MatrixXd::Zero(s + t, 2 * s + k);
  Tmap.topLeftCorner(s, s).setIdentity();
  Tmap.block(0, s, s, s + k) = coef;
  Tmap.block(s, s, t, s + k) = R2;

  MatrixXd M = MatrixXd::Zero(2 * s + k, 2 * s + k);
  M.block(0, s, s, s) = state.X_small;
  M.block(s, 0, s, s) = state.X_small;
  M.block(2 * s, 2 * s, k, k).setIdentity();

  const double num = (Tmap * M * Tmap.transpose()).norm();
  return num / denom;
}

LowRankFactor extract_factor(const EksState& state) {
  LowRankFactor factor;
  factor.iterations = state.j;
  factor.basis_size = state.basis_size();
  factor.residual_history = state.residual_history;
  if (!state.has_solution || state.X_small.rows() == 0) {
    factor.Z.resize(state.K.rows(), 0);
    return factor;
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(
      0.5 * (state.X_small + state.X_small.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the projected solution failed");
  const VectorXd& lambda = es.eigenvalues();  // ascending
  const double lmax = lambda.maxCoeff();
  if (lmax <= 0.0) {
    factor.Z.resize(state.K.rows(), 0);
    return factor;
  }
  const double cut = state.opts.deflation_tol * lmax;
  if (lambda.minCoeff() < -cut)
    throw NumericalError(
        "projected Gramian is indefinite beyond tolerance (smallest "
        "eigenvalue " +
        std::to_string(lambda.minCoeff()) + ")");

  Index kept = 0;
  for (Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) >= cut) ++kept;
  MatrixXd Us(state.X_small.rows(), kept);
  VectorXd sq(kept);
  // descending order
  for (Index i = 0; i < kept; ++i) {
    const Index src = lambda.size() - 1 - i;
    Us.col(i) = es.eigenvectors().col(src);
    sq(i) = std::sqrt(lambda(src));
  }
  MatrixXd z = state.K * (Us * sq.asDiagonal());
  factor.Z = state.factor_map ? state.factor_map(z) : std::move(z);
  return factor;
}

LowRankFactor solve_eks(const LyapunovProblem& problem, const EksOptions& opts) {
  EksState state = eks_init(problem, opts);
  if (state.basis_size() == 0) {
    // zero right-hand side: the exact solution is P = 0
    LowRankFactor factor;
    factor.Z.resize(problem.order(), 0);
    factor.converged = true;
    return factor;
  }

  // A projected matrix can transiently lose the Hurwitz property on
  // non-symmetric systems even though the full-basis projection is similar
  // to A (and therefore stable). Defer the solve and keep expanding; give up
  // only if the instability persists at the final basis.
  double resid = 1.0;
  bool solve_ok = false;
  std::string last_failure;
  while (true) {
    try {
      solve_projected(state, problem);
      solve_ok = true;
    } catch (const NumericalError& e) {
      solve_ok = false;
      last_failure = e.what();
    }
    if (solve_ok) {
      resid = residual_norm(state, problem);
      state.residual_history.push_back(resid);
      if (resid <= opts.tol) break;
    }
    if (state.j >= opts.maxiter) break;
    if (state.stagnated) break;  // invariant subspace; cannot improve further
    eks_expand(state, problem);
  }
  if (!solve_ok)
    throw NumericalError("EKS failed at the final basis: " + last_failure);

  LowRankFactor factor = extract_factor(state);
  factor.converged = (resid <= opts.tol);
  factor.residual = resid;
  factor.residual_history = state.residual_history;
  return factor;
}

}  // namespace morkit
