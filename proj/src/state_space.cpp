#include "morkit/state_space.hpp"

#include <vector>

#include "morkit/errors.hpp"
#include "morkit/matrix_market.hpp"

namespace morkit {

StateSpaceModel to_state_space(const MnaSystem& mna, double eps_reg) {
  mna.validate();
  const Eigen::Index n = mna.n, m = mna.m, N = n + m;

  StateSpaceModel model;
  model.n = n;
  model.m = m;
  model.eps_reg = eps_reg;

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> g;
  for (int k = 0; k < mna.Gn.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mna.Gn, k); it; ++it)
      g.emplace_back(it.row(), it.col(), -it.value());
  for (int k = 0; k < mna.E.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mna.E, k); it; ++it) {
      g.emplace_back(it.row(), static_cast<int>(n) + it.col(), -it.value());
      g.emplace_back(static_cast<int>(n) + it.col(), it.row(), it.value());
    }
  model.G.resize(N, N);
  model.G.setFromTriplets(g.begin(), g.end());

  std::vector<Triplet> c;
  Eigen::VectorXd cn_diag = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < mna.Cn.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mna.Cn, k); it; ++it) {
      c.emplace_back(it.row(), it.col(), it.value());
      if (it.row() == it.col()) cn_diag(it.row()) = it.value();
    }
  for (Eigen::Index i = 0; i < n; ++i)
    if (cn_diag(i) == 0.0) {
      c.emplace_back(static_cast<int>(i), static_cast<int>(i), eps_reg);
      ++model.regularized_count;
    }
  for (int k = 0; k < mna.M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(mna.M, k); it; ++it)
      c.emplace_back(static_cast<int>(n) + it.row(),
                     static_cast<int>(n) + it.col(), it.value());
  model.C.resize(N, N);
  model.C.setFromTriplets(c.begin(), c.end());

  model.B = Eigen::MatrixXd::Zero(N, mna.p);
  model.B.topRows(n) = mna.B1;
  model.L = Eigen::MatrixXd::Zero(mna.q, N);
  model.L.leftCols(n) = mna.L1;

  model.G.makeCompressed();
  model.C.makeCompressed();
  return model;
}

StateSpaceModel load_matrices(const ModelPaths& paths) {
  StateSpaceModel model;
  model.G = read_matrix_market(paths.g);
  model.C = read_matrix_market(paths.c);
  Eigen::SparseMatrix<double> b = read_matrix_market(paths.b);
  Eigen::SparseMatrix<double> l = read_matrix_market(paths.l);

  const Eigen::Index N = model.G.rows();
  if (model.G.cols() != N)
    throw DimensionError("G must be square, got " + std::to_string(N) + " x " +
                         std::to_string(model.G.cols()));
  if (model.C.rows() != N || model.C.cols() != N)
    throw DimensionError("C is " + std::to_string(model.C.rows()) + " x " +
                         std::to_string(model.C.cols()) + ", expected " +
                         std::to_string(N) + " x " + std::to_string(N));
  if (b.rows() != N)
    throw DimensionError("B has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(N));
  if (l.cols() != N)
    throw DimensionError("L has " + std::to_string(l.cols()) +
                         " columns, expected " + std::to_string(N));

  const double scale = model.C.coeffs().size()
                           ? model.C.coeffs().abs().maxCoeff()
                           : 0.0;
  Eigen::SparseMatrix<double> asym =
      Eigen::SparseMatrix<double>(model.C.transpose()) - model.C;
  if (asym.coeffs().size() &&
      asym.coeffs().abs().maxCoeff() > 1e-12 * scale)
    throw NumericalError("loaded C matrix is not symmetric");

  model.B = Eigen::MatrixXd(b);
  model.L = Eigen::MatrixXd(l);
  model.n = N;
  model.m = 0;
  model.G.makeCompressed();
  model.C.makeCompressed();
  return model;
}

}  // namespace morkit
