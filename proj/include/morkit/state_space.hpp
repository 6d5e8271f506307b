#ifndef MORKIT_STATE_SPACE_HPP
#define MORKIT_STATE_SPACE_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>

#include "morkit/mna.hpp"

namespace morkit {

/// Descriptor state-space quadruple
///
///   C x'(t) = G x(t) + B u(t),    y(t) = L x(t)
///
/// of order N = n + m. Immutable once built; safe to share across threads
/// read-only.
struct StateSpaceModel {
  Eigen::SparseMatrix<double> C;  // N x N, symmetric positive definite
  Eigen::SparseMatrix<double> G;  // N x N
  Eigen::MatrixXd B;              // N x p
  Eigen::MatrixXd L;              // q x N

  Eigen::Index n = 0;  // node-voltage states (n = N for loaded models)
  Eigen::Index m = 0;  // inductor-current states

  // Capacitance regularization applied during conversion.
  double eps_reg = 0.0;
  Eigen::Index regularized_count = 0;

  Eigen::Index order() const { return C.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return L.rows(); }
};

/// Default Farads added to zero diagonal entries of Cn so that C stays
/// invertible when some node carries no capacitor.
inline constexpr double kDefaultCapRegularization = 1e-18;

/// Builds the state-space quadruple from the MNA blocks:
///
///   G = -[Gn  E; -E' 0],   C = blkdiag(Cn, M),   B = [B1; 0],   L = [L1 0].
///
/// Zero diagonal entries of Cn get eps_reg added; the perturbation is
/// recorded in the returned model.
StateSpaceModel to_state_space(const MnaSystem& mna,
                               double eps_reg = kDefaultCapRegularization);

struct ModelPaths {
  std::string g, c, b, l;
};

/// Loads a model from four Matrix Market files. Matrices are kept exactly as
/// stored (no regularization); dimensions and the symmetry of C are checked.
StateSpaceModel load_matrices(const ModelPaths& paths);

}  // namespace morkit

#endif  // MORKIT_STATE_SPACE_HPP
