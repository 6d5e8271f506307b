#include "morkit/lyapunov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "morkit/errors.hpp"

#ifdef MORKIT_USE_LAPACKE
#include <lapacke.h>
#endif

namespace morkit {

using Eigen::Index;
using Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// LyapunovProblem
// ---------------------------------------------------------------------------

LyapunovProblem LyapunovProblem::from_dense(MatrixXd A, MatrixXd F) {
  if (A.rows() != A.cols())
    throw DimensionError("A must be square");
  if (F.rows() != A.rows())
    throw DimensionError("F row count does not match A");
  LyapunovProblem p;
  p.N_ = A.rows();
  p.A_lu_ = std::make_shared<Eigen::PartialPivLU<MatrixXd>>(A);
  p.A_ = std::move(A);
  p.F_ = std::move(F);
  return p;
}

std::shared_ptr<LyapunovProblem::Operators> LyapunovProblem::factorize(
    const StateSpaceModel& model, bool transposed) {
  auto ops = std::make_shared<Operators>();
  ops->C = model.C;
  ops->G = model.G;
  ops->C.makeCompressed();
  ops->G.makeCompressed();

  ops->C_chol.compute(ops->C);
  if (ops->C_chol.info() != Eigen::Success)
    throw NumericalError(
        "cannot factor C (singular or not positive definite); regularize the "
        "capacitance matrix");

  // the transposed problem solves with G', so factor that directly
  if (transposed) {
    Eigen::SparseMatrix<double> gt = ops->G.transpose();
    ops->G_fact.compute(gt);
  } else {
    ops->G_fact.compute(ops->G);
  }
  if (ops->G_fact.info() != Eigen::Success)
    throw NumericalError("G factorization failed (structurally singular G?)");
  return ops;
}

// C = P' L L' P, so R = P' L satisfies C = R R'.
Eigen::MatrixXd LyapunovProblem::r_mul(
    const Eigen::Ref<const MatrixXd>& X) const {
  return ops_->C_chol.permutationPinv() *
         MatrixXd(ops_->C_chol.matrixL() * X);
}

Eigen::MatrixXd LyapunovProblem::rT_mul(
    const Eigen::Ref<const MatrixXd>& X) const {
  return ops_->C_chol.matrixU() * MatrixXd(ops_->C_chol.permutationP() * X);
}

Eigen::MatrixXd LyapunovProblem::r_solve(
    const Eigen::Ref<const MatrixXd>& X) const {
  return ops_->C_chol.matrixL().solve(
      MatrixXd(ops_->C_chol.permutationP() * X));
}

Eigen::MatrixXd LyapunovProblem::rT_solve(
    const Eigen::Ref<const MatrixXd>& X) const {
  return ops_->C_chol.permutationPinv() *
         MatrixXd(ops_->C_chol.matrixU().solve(X));
}

LyapunovProblem LyapunovProblem::controllability(const StateSpaceModel& model) {
  LyapunovProblem p;
  p.ops_ = factorize(model, false);
  p.transposed_ = false;
  p.N_ = model.order();
  p.F_ = p.r_solve(model.B);  // R^{-1} B, the transformed C^{-1}B
  return p;
}

LyapunovProblem LyapunovProblem::observability(const StateSpaceModel& model) {
  LyapunovProblem p;
  p.ops_ = factorize(model, true);
  p.transposed_ = true;
  p.N_ = model.order();
  p.F_ = p.r_solve(model.L.transpose());  // R^{-1} L'
  return p;
}

Eigen::MatrixXd LyapunovProblem::apply(
    const Eigen::Ref<const MatrixXd>& X) const {
  if (!ops_) return A_ * X;
  if (!transposed_) return r_solve(ops_->G * rT_solve(X));  // R^{-1}G R^{-T} X
  return r_solve(ops_->G.transpose() * rT_solve(X));        // R^{-1}G'R^{-T} X
}

Eigen::MatrixXd LyapunovProblem::apply_inverse(
    const Eigen::Ref<const MatrixXd>& X) const {
  if (!ops_) return A_lu_->solve(X);
  // (R^{-1} G R^{-T})^{-1} = R' G^{-1} R; G_fact holds G or G'
  return rT_mul(ops_->G_fact.solve(r_mul(X)));
}

Eigen::MatrixXd LyapunovProblem::dense_a() const {
  if (!ops_) return A_;
  const MatrixXd rinvT = rT_solve(MatrixXd::Identity(N_, N_));
  if (!transposed_) return r_solve(ops_->G * rinvT);
  return r_solve(ops_->G.transpose() * rinvT);
}

Eigen::MatrixXd LyapunovProblem::map_factor(
    const Eigen::Ref<const MatrixXd>& Z) const {
  if (!ops_) return Z;
  // P = R^{-T} P~ R^{-1} (controllability) or Q = R Q~ R' (observability)
  return transposed_ ? r_mul(Z) : rT_solve(Z);
}

Eigen::MatrixXd LyapunovProblem::map_solution(
    const Eigen::Ref<const MatrixXd>& P) const {
  if (!ops_) return P;
  const MatrixXd half = map_factor(P);
  return map_factor(half.transpose()).transpose();
}

// ---------------------------------------------------------------------------
// Dense solver
// ---------------------------------------------------------------------------

namespace {

// Quasi-triangular block boundaries of a real Schur T.
std::vector<Index> schur_blocks(const MatrixXd& T) {
  std::vector<Index> starts;
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    starts.push_back(i);
    i += (i + 1 < n && T(i + 1, i) != 0.0) ? 2 : 1;
  }
  starts.push_back(n);
  return starts;
}

void require_hurwitz(const MatrixXd& T) {
  const auto starts = schur_blocks(T);
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t b = 0; b + 1 < starts.size(); ++b) {
    const Index i = starts[b];
    const double re = (starts[b + 1] - i == 1)
                          ? T(i, i)
                          : 0.5 * (T(i, i) + T(i + 1, i + 1));
    worst = std::max(worst, re);
  }
  if (!(worst < 0.0))
    throw NumericalError(
        "matrix is not Hurwitz: eigenvalue with real part " +
        std::to_string(worst));
}

#ifdef MORKIT_USE_LAPACKE
MatrixXd lyap_quasi_triangular_lapack(const MatrixXd& T, const MatrixXd& W) {
  MatrixXd X = W;
  double scale = 1.0;
  const lapack_int n = static_cast<lapack_int>(T.rows());
  const lapack_int info = LAPACKE_dtrsyl(
      LAPACK_COL_MAJOR, 'N', 'T', 1, n, n, T.data(), n, T.data(), n, X.data(),
      n, &scale);
  if (info < 0)
    throw NumericalError("dtrsyl failed with info " + std::to_string(info));
  // info == 1 flags perturbed nearly-common eigenvalues; the refinement loop
  // in lyap_dense absorbs it.
  if (scale != 1.0) X /= scale;
  return X;
}
#endif

MatrixXd solve_schur_lyapunov(const MatrixXd& T, const MatrixXd& W) {
#ifdef MORKIT_USE_LAPACKE
  return lyap_quasi_triangular_lapack(T, W);
#else
  return lyap_quasi_triangular_ref(T, W);
#endif
}

}  // namespace

Eigen::MatrixXd lyap_quasi_triangular_ref(const MatrixXd& T,
                                          const MatrixXd& W) {
  const Index n = T.rows();
  MatrixXd Y = MatrixXd::Zero(n, n);
  const auto starts = schur_blocks(T);
  const int nb = static_cast<int>(starts.size()) - 1;

  // Backward block substitution over the symmetric solution: for block (i,j)
  //   T_ii Y_ij + Y_ij T_jj' = W_ij - sum_{k>i} T_ik Y_kj - sum_{k>j} Y_ik T_jk'
  // processed by descending column blocks, symmetric fill as we go.
  for (int jb = nb - 1; jb >= 0; --jb) {
    const Index j0 = starts[jb], bj = starts[jb + 1] - j0, j1 = j0 + bj;
    for (int ib = jb; ib >= 0; --ib) {
      const Index i0 = starts[ib], bi = starts[ib + 1] - i0, i1 = i0 + bi;
      MatrixXd rhs = W.block(i0, j0, bi, bj);
      if (i1 < n) rhs.noalias() -= T.block(i0, i1, bi, n - i1) * Y.block(i1, j0, n - i1, bj);
      if (j1 < n) rhs.noalias() -= Y.block(i0, j1, bi, n - j1) * T.block(j0, j1, bj, n - j1).transpose();

      // Tiny Sylvester system via Kronecker form, at most 4 x 4.
      const Index sz = bi * bj;
      Eigen::Matrix<double, 4, 4> K;
      K.setZero();
      for (Index cj = 0; cj < bj; ++cj)
        for (Index ri = 0; ri < bi; ++ri) {
          const Index row = cj * bi + ri;
          for (Index ci = 0; ci < bi; ++ci)
            K(row, cj * bi + ci) += T(i0 + ri, i0 + ci);
          for (Index cj2 = 0; cj2 < bj; ++cj2)
            K(row, cj2 * bi + ri) += T(j0 + cj, j0 + cj2);
        }
      Eigen::Vector4d v;
      for (Index cj = 0; cj < bj; ++cj)
        for (Index ri = 0; ri < bi; ++ri) v(cj * bi + ri) = rhs(ri, cj);
      Eigen::Vector4d x = Eigen::Vector4d::Zero();
      x.head(sz) =
          K.topLeftCorner(sz, sz).partialPivLu().solve(v.head(sz).eval());

      for (Index cj = 0; cj < bj; ++cj)
        for (Index ri = 0; ri < bi; ++ri) Y(i0 + ri, j0 + cj) = x(cj * bi + ri);
      if (ib != jb)
        Y.block(j0, i0, bj, bi) = Y.block(i0, j0, bi, bj).transpose();
    }
  }
  return Y;
}

Eigen::MatrixXd lyap_dense(const Eigen::Ref<const MatrixXd>& A,
                           const Eigen::Ref<const MatrixXd>& F) {
  if (A.rows() != A.cols()) throw DimensionError("A must be square");
  if (F.rows() != A.rows()) throw DimensionError("F row count does not match A");
  const Index n = A.rows();
  if (n == 0) return MatrixXd(0, 0);

  Eigen::RealSchur<MatrixXd> schur(A);
  if (schur.info() != Eigen::Success)
    throw NumericalError("real Schur decomposition did not converge");
  const MatrixXd& T = schur.matrixT();
  const MatrixXd& U = schur.matrixU();
  require_hurwitz(T);

  const MatrixXd FFt = F * F.transpose();
  const double rhs_norm = FFt.norm();

  MatrixXd Fh = U.transpose() * F;
  MatrixXd W = -(Fh * Fh.transpose());
  MatrixXd Y = solve_schur_lyapunov(T, W);
  MatrixXd P = U * Y * U.transpose();
  P = 0.5 * (P + P.transpose()).eval();

  if (rhs_norm == 0.0) return P;

  // One or two refinement sweeps reusing the Schur factors; keeps the
  // relative residual well below the 1e-10 contract even for stiff A.
  for (int pass = 0; pass < 3; ++pass) {
    MatrixXd R = A * P;
    R += R.transpose().eval();
    R += FFt;
    if (R.norm() <= 5e-12 * rhs_norm) break;
    MatrixXd Wc = -(U.transpose() * R * U);
    MatrixXd Yc = solve_schur_lyapunov(T, Wc);
    P.noalias() += U * Yc * U.transpose();
    P = 0.5 * (P + P.transpose()).eval();
  }
  return P;
}

Eigen::MatrixXd solve_dense(const LyapunovProblem& problem,
                            Eigen::Index dense_cutoff) {
  if (problem.order() > dense_cutoff)
    throw Error("dense Lyapunov solve refused: order " +
                std::to_string(problem.order()) + " exceeds cutoff " +
                std::to_string(dense_cutoff));
  return problem.map_solution(lyap_dense(problem.dense_a(), problem.rhs()));
}

}  // namespace morkit
