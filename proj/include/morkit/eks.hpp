#ifndef MORKIT_EKS_HPP
#define MORKIT_EKS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "morkit/lyapunov.hpp"

namespace morkit {

struct EksOptions {
  int maxiter = 100;            // expansion rounds
  double tol = 1e-8;            // relative factored-residual target
  double deflation_tol = 1e-10; // basis / spectrum rank tolerance
};

/// Low-rank Gramian factor Z with P ~= Z Z', plus solve diagnostics.
struct LowRankFactor {
  Eigen::MatrixXd Z;
  bool converged = true;
  int iterations = 0;
  double residual = 0.0;
  Eigen::Index basis_size = 0;
  std::vector<double> residual_history;

  Eigen::Index rank() const { return Z.cols(); }
};

/// State of the extended Krylov iteration. The basis K is orthonormal
/// (re-orthogonalized, ||K'K - I||_max <= 1e-12); each expansion round
/// appends up to 2p columns, split into a block propagated by A and a block
/// propagated by A^{-1}. Deflation can shrink either half, so the actual
/// block widths are tracked instead of assuming a constant p.
struct EksState {
  Eigen::MatrixXd K;   // N x s orthonormal basis
  Eigen::MatrixXd AK;  // A applied to every basis column
  int j = 0;           // completed rounds (1 after the initial block)

  // Column ranges in K of the most recent block's two halves.
  Eigen::Index fwd_begin = 0, fwd_count = 0;
  Eigen::Index inv_begin = 0, inv_count = 0;

  Eigen::MatrixXd A_small;  // K' A K
  Eigen::MatrixXd R_small;  // K' F
  Eigen::MatrixXd X_small;  // projected Lyapunov solution
  bool has_solution = false;
  bool stagnated = false;  // last expansion added nothing

  std::vector<double> residual_history;
  EksOptions opts;

  // translates factors of the internal equation back to model coordinates
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> factor_map;

  Eigen::Index basis_size() const { return K.cols(); }
};

/// Initial basis: orthonormalize [F, A^{-1}F] (round 1).
EksState eks_init(const LyapunovProblem& problem, const EksOptions& opts = {});

/// One expansion round: the new block [A * fwd, A^{-1} * inv] is
/// orthogonalized against the existing basis and internally, dropping columns
/// whose norm collapses below deflation_tol of their pre-orthogonalization
/// norm. A fully deflated block marks the state stagnated (invariant subspace
/// reached); expanding again from a stagnated state is an error.
void eks_expand(EksState& state, const LyapunovProblem& problem);

/// Projects the equation onto the current basis and solves the small dense
/// Lyapunov equation A_small X + X A_small' = -R_small R_small'.
void solve_projected(EksState& state, const LyapunovProblem& problem);

/// Relative residual ||A P_j + P_j A' + F F'||_F / ||F F'||_F of the current
/// low-rank iterate P_j = K X_small K', evaluated on the augmented basis
/// [K, A K, F] without ever forming P_j. Returns 1.0 before the first
/// projected solve.
double residual_norm(const EksState& state, const LyapunovProblem& problem);

/// Z = K U S^{1/2} from the eigendecomposition of X_small (symmetric PSD, so
/// the SVD of the algorithm is realized as a symmetric eigendecomposition
/// with U = V). Components below deflation_tol of the largest are dropped.
LowRankFactor extract_factor(const EksState& state);

/// Full loop: init, then project/solve/check/expand until the residual drops
/// below opts.tol or maxiter rounds are exhausted (the best factor is then
/// returned with converged = false).
LowRankFactor solve_eks(const LyapunovProblem& problem,
                        const EksOptions& opts = {});

}  // namespace morkit

#endif  // MORKIT_EKS_HPP
