#include "morkit/mna.hpp"

#include <vector>

#include "morkit/errors.hpp"

namespace morkit {

namespace {

using Triplet = Eigen::Triplet<double>;

// Two-terminal conductance/capacitance stamp; ground rows/columns dropped.
void stamp_branch(std::vector<Triplet>& t, int a, int b, double g) {
  if (a != kGround) t.emplace_back(a, a, g);
  if (b != kGround) t.emplace_back(b, b, g);
  if (a != kGround && b != kGround) {
    t.emplace_back(a, b, -g);
    t.emplace_back(b, a, -g);
  }
}

bool exactly_symmetric(const Eigen::SparseMatrix<double>& m) {
  Eigen::SparseMatrix<double> d = Eigen::SparseMatrix<double>(m.transpose()) - m;
  return d.squaredNorm() == 0.0;
}

}  // namespace

MnaSystem assemble_mna(const RlckNetlist& net) {
  net.validate();

  MnaSystem sys;
  sys.n = net.node_count();
  sys.m = static_cast<Eigen::Index>(net.inductors().size());
  sys.p = static_cast<Eigen::Index>(net.ports().size());
  sys.q = sys.p;

  std::vector<Triplet> gn, cn, mm, ee;
  for (const Resistor& r : net.resistors())
    stamp_branch(gn, r.node_a, r.node_b, 1.0 / r.ohms);
  for (const Capacitor& c : net.capacitors())
    stamp_branch(cn, c.node_a, c.node_b, c.farads);
  for (size_t k = 0; k < net.inductors().size(); ++k) {
    const Inductor& l = net.inductors()[k];
    const int col = static_cast<int>(k);
    if (l.node_a != kGround) ee.emplace_back(l.node_a, col, 1.0);
    if (l.node_b != kGround) ee.emplace_back(l.node_b, col, -1.0);
    mm.emplace_back(col, col, l.henries);
  }
  for (const MutualInductor& k : net.mutual_inductors()) {
    mm.emplace_back(k.inductor_a, k.inductor_b, k.henries);
    mm.emplace_back(k.inductor_b, k.inductor_a, k.henries);
  }

  sys.Gn.resize(sys.n, sys.n);
  sys.Gn.setFromTriplets(gn.begin(), gn.end());
  sys.Cn.resize(sys.n, sys.n);
  sys.Cn.setFromTriplets(cn.begin(), cn.end());
  sys.M.resize(sys.m, sys.m);
  sys.M.setFromTriplets(mm.begin(), mm.end());
  sys.E.resize(sys.n, sys.m);
  sys.E.setFromTriplets(ee.begin(), ee.end());

  sys.B1 = Eigen::MatrixXd::Zero(sys.n, sys.p);
  for (size_t i = 0; i < net.ports().size(); ++i)
    sys.B1(net.ports()[i].node, static_cast<Eigen::Index>(i)) = 1.0;
  sys.L1 = sys.B1.transpose();
  return sys;
}

void MnaSystem::validate() const {
  if (Gn.rows() != n || Gn.cols() != n || Cn.rows() != n || Cn.cols() != n)
    throw DimensionError("node matrices are not n x n");
  if (M.rows() != m || M.cols() != m || E.rows() != n || E.cols() != m)
    throw DimensionError("branch matrices do not match m");
  if (B1.rows() != n || B1.cols() != p || L1.rows() != q || L1.cols() != n)
    throw DimensionError("port matrices do not match (n, p, q)");

  if (!exactly_symmetric(Gn)) throw NumericalError("Gn is not symmetric");
  if (!exactly_symmetric(Cn)) throw NumericalError("Cn is not symmetric");
  if (!exactly_symmetric(M)) throw NumericalError("M is not symmetric");

  for (Eigen::Index i = 0; i < n; ++i) {
    if (Gn.coeff(i, i) < 0.0) throw NumericalError("negative Gn diagonal");
    if (Cn.coeff(i, i) < 0.0) throw NumericalError("negative Cn diagonal");
  }
  for (Eigen::Index i = 0; i < m; ++i)
    if (M.coeff(i, i) <= 0.0)
      throw NumericalError("non-positive self inductance on branch " +
                           std::to_string(i));

  for (int k = 0; k < E.outerSize(); ++k) {
    int nnz = 0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(E, k); it; ++it) {
      if (it.value() != 1.0 && it.value() != -1.0)
        throw NumericalError("E entry outside {-1, 0, +1}");
      ++nnz;
    }
    if (nnz > 2)
      throw NumericalError("E column " + std::to_string(k) +
                           " has more than two nonzeros");
  }
}

}  // namespace morkit
