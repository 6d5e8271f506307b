#ifndef MORKIT_LYAPUNOV_HPP
#define MORKIT_LYAPUNOV_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <memory>

#include "morkit/state_space.hpp"

namespace morkit {

/// A Lyapunov equation  A P + P A' = -F F'  with A Hurwitz and F tall-skinny.
///
/// For circuit models the underlying operator is C^{-1}G (controllability
/// side) or its transpose (observability side); it is never formed
/// explicitly. Internally the equation is posed in congruence-transformed
/// coordinates built from a sparse Cholesky factorization C = R R':
///
///   A~ = R^{-1} G R^{-T}   (controllability),   A~' (observability),
///
/// which has the same spectrum as C^{-1}G but satisfies A~ + A~' <= 0 for a
/// passive network, so orthonormal projections of it cannot drift (far) into
/// the right half-plane. Products with A~ use the factorization of C;
/// products with A~^{-1} use a sparse factorization of G. map_factor /
/// map_solution translate solutions of the internal equation back to the
/// original state coordinates. Dense test problems wrap explicit matrices
/// with identity maps. Instances are immutable and safe to share across
/// threads.
class LyapunovProblem {
 public:
  /// Explicit dense A (used for small problems and tests).
  static LyapunovProblem from_dense(Eigen::MatrixXd A, Eigen::MatrixXd F);

  /// First equation of the Gramian pair (solution maps back to P).
  static LyapunovProblem controllability(const StateSpaceModel& model);

  /// Second equation of the Gramian pair (solution maps back to Q).
  static LyapunovProblem observability(const StateSpaceModel& model);

  Eigen::Index order() const { return N_; }
  Eigen::Index rhs_cols() const { return F_.cols(); }
  /// Right-hand-side factor of the internal equation.
  const Eigen::MatrixXd& rhs() const { return F_; }

  /// A~ * X.
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  /// A~^{-1} * X.
  Eigen::MatrixXd apply_inverse(
      const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  /// Materializes A~ as a dense matrix (dense solver path only).
  Eigen::MatrixXd dense_a() const;

  /// Maps a low-rank factor of the internal solution back to the original
  /// state coordinates (identity for dense-wrapped problems).
  Eigen::MatrixXd map_factor(const Eigen::Ref<const Eigen::MatrixXd>& Z) const;
  /// Same for a full solution matrix.
  Eigen::MatrixXd map_solution(
      const Eigen::Ref<const Eigen::MatrixXd>& P) const;

 private:
  struct Operators {
    Eigen::SparseMatrix<double> C, G;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> C_chol;  // C = R R'
    Eigen::SparseLU<Eigen::SparseMatrix<double>> G_fact;       // of G or G'
  };

  LyapunovProblem() = default;
  static std::shared_ptr<Operators> factorize(const StateSpaceModel& model,
                                              bool transposed);

  // R = P' L from the permuted Cholesky P C P' = L L'.
  Eigen::MatrixXd r_mul(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::MatrixXd rT_mul(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::MatrixXd r_solve(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
  Eigen::MatrixXd rT_solve(const Eigen::Ref<const Eigen::MatrixXd>& X) const;

  std::shared_ptr<const Operators> ops_;  // factored form; null in dense mode
  bool transposed_ = false;
  Eigen::MatrixXd A_;  // dense mode only
  std::shared_ptr<const Eigen::PartialPivLU<Eigen::MatrixXd>> A_lu_;
  Eigen::MatrixXd F_;
  Eigen::Index N_ = 0;
};

/// Solves T Y + Y T' = W for W symmetric and T quasi-upper-triangular (real
/// Schur form). Reference implementation, always available; the production
/// path uses LAPACK dtrsyl when built with it.
Eigen::MatrixXd lyap_quasi_triangular_ref(const Eigen::MatrixXd& T,
                                          const Eigen::MatrixXd& W);

/// Solves A P + P A' = -F F' for dense A via real Schur reduction, with
/// iterative refinement until the relative residual
/// ||A P + P A' + F F'||_F / ||F F'||_F drops below 1e-10 (typically much
/// lower). Throws NumericalError if A is not Hurwitz. The result is exactly
/// symmetric.
Eigen::MatrixXd lyap_dense(const Eigen::Ref<const Eigen::MatrixXd>& A,
                           const Eigen::Ref<const Eigen::MatrixXd>& F);

/// Dense-path entry point: materializes the internal operator, solves, and
/// maps the solution back to original coordinates. Refuses problems larger
/// than dense_cutoff.
Eigen::MatrixXd solve_dense(const LyapunovProblem& problem,
                            Eigen::Index dense_cutoff = 5000);

}  // namespace morkit

#endif  // MORKIT_LYAPUNOV_HPP
