#ifndef MORKIT_MNA_HPP
#define MORKIT_MNA_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "morkit/netlist.hpp"

namespace morkit {

/// The matrices of the modified nodal analysis system
///
///   [Gn  E ] [v]   [Cn  0] [v']   [B1]
///   [-E' 0 ] [i] + [0   M] [i'] = [0 ] u,    y = [L1 0] [v; i]
///
/// with n node voltages, m inductor branch currents, p inputs, q outputs.
struct MnaSystem {
  Eigen::SparseMatrix<double> Gn;  // n x n node conductances
  Eigen::SparseMatrix<double> Cn;  // n x n node capacitances
  Eigen::SparseMatrix<double> M;   // m x m branch (self + mutual) inductances
  Eigen::SparseMatrix<double> E;   // n x m node-to-branch incidence
  Eigen::MatrixXd B1;              // n x p input-to-node connectivity
  Eigen::MatrixXd L1;              // q x n node-to-output connectivity
  Eigen::Index n = 0, m = 0, p = 0, q = 0;

  /// Checks symmetry of Gn, Cn, M (exact, the stamps are symmetric by
  /// construction), diagonal sign conditions, and the incidence structure of
  /// E ({-1,0,+1} entries, at most two per column).
  void validate() const;
};

/// Stamps every element of the netlist into an MnaSystem. Ports become unit
/// current injections (B1) observed as port voltages (L1 = B1'), so the
/// port-level transfer function is an impedance matrix.
MnaSystem assemble_mna(const RlckNetlist& net);

}  // namespace morkit

#endif  // MORKIT_MNA_HPP
