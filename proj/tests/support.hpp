#ifndef MORKIT_TESTS_SUPPORT_HPP
#define MORKIT_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "morkit/state_space.hpp"

namespace testsupport {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(std::mt19937& rng, Index rows, Index cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

/// Random dense Hurwitz matrix: gaussian matrix shifted left of the imaginary
/// axis by its spectral abscissa plus a margin.
inline MatrixXd random_stable_dense(std::mt19937& rng, Index n,
                                    double margin_lo = 0.05,
                                    double margin_hi = 0.5) {
  MatrixXd a = random_matrix(rng, n, n) / std::sqrt(static_cast<double>(n));
  Eigen::EigenSolver<MatrixXd> es(a, false);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  std::uniform_real_distribution<double> margin(margin_lo, margin_hi);
  a.diagonal().array() -= abscissa + margin(rng);
  return a;
}

/// Random sparse stable matrix: symmetric negative-definite chain (discrete
/// diffusion) plus an optional skew perturbation that keeps the field of
/// values in the left half-plane.
inline Eigen::SparseMatrix<double> random_stable_sparse(std::mt19937& rng,
                                                        Index n,
                                                        double skew = 0.0) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_real_distribution<double> d(0.1, 1.0);
  std::vector<Eigen::Triplet<double>> t;
  std::vector<double> link(n > 1 ? n - 1 : 0);
  for (auto& v : link) v = w(rng);
  for (Index i = 0; i < n; ++i) {
    double diag = d(rng);
    if (i > 0) diag += link[i - 1];
    if (i + 1 < n) diag += link[i];
    t.emplace_back(i, i, -diag);
    if (i + 1 < n) {
      const double s = skew * d(rng);
      t.emplace_back(i, i + 1, link[i] + s);
      t.emplace_back(i + 1, i, link[i] - s);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

/// Wraps (A, B, L) as a descriptor model with C = I, so the state-space
/// matrices coincide with the standard form used by the balancing theory.
inline morkit::StateSpaceModel identity_c_model(const MatrixXd& a,
                                                const MatrixXd& b,
                                                const MatrixXd& l) {
  morkit::StateSpaceModel model;
  const Index n = a.rows();
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();
  model.C = identity;
  std::vector<Eigen::Triplet<double>> t;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (a(i, j) != 0.0)
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), a(i, j));
  model.G.resize(n, n);
  model.G.setFromTriplets(t.begin(), t.end());
  model.G.makeCompressed();
  model.B = b;
  model.L = l;
  model.n = n;
  return model;
}

inline morkit::StateSpaceModel random_stable_model(std::mt19937& rng, Index n,
                                                   Index p, Index q) {
  return identity_c_model(random_stable_dense(rng, n),
                          random_matrix(rng, n, p), random_matrix(rng, q, n));
}

/// Independent oracle: solves A P + P A' = -F F' through the Kronecker
/// vectorization (I (x) A + A (x) I) vec(P) = -vec(F F'), a direct linear
/// solve that shares nothing with the Schur-based production path.
inline MatrixXd kron_lyapunov_oracle(const MatrixXd& a, const MatrixXd& f) {
  const Index n = a.rows();
  MatrixXd big = MatrixXd::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k) {
        big(j * n + i, j * n + k) += a(i, k);  // I (x) A
        big(j * n + i, k * n + i) += a(j, k);  // A (x) I
      }
  const MatrixXd ff = f * f.transpose();
  VectorXd rhs(n * n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) rhs(j * n + i) = -ff(i, j);
  const VectorXd x = big.partialPivLu().solve(rhs);
  MatrixXd p(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) p(i, j) = x(j * n + i);
  return p;
}

inline double rel_error(const MatrixXd& reference, const MatrixXd& value) {
  return (value - reference).norm() / reference.norm();
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Two-port RC ladder netlist: a chain of series resistors with a shunt
/// capacitor on every node, terminated to ground, ports at both ends.
/// State-space order equals `nodes`.
inline std::string rc_ladder_netlist(int nodes, unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> r_ohms(0.5, 2.0);
  std::uniform_real_distribution<double> c_farads(1e-15, 4e-15);
  std::ostringstream net;
  net << "* synthetic RC ladder, " << nodes << " nodes\n";
  for (int i = 1; i < nodes; ++i)
    net << "R" << i << " " << i << " " << (i + 1) << " " << num(r_ohms(rng))
        << "\n";
  net << "Rterm " << nodes << " 0 100\n";
  for (int i = 1; i <= nodes; ++i)
    net << "C" << i << " " << i << " 0 " << num(c_farads(rng)) << "\n";
  net << "P1 1\n";
  net << "P2 " << nodes << "\n";
  return net.str();
}

/// Two-port RLCk interconnect: a short coupled R+L trunk between the ports
/// (internal node inside every section, neighbor mutual coupling, resistive
/// terminations) decorated with a deep RC parasitic stub at every junction,
/// the way extracted interconnect models carry large weakly-coupled
/// parasitic tails. With J junctions and stub depth D the state-space order
/// is N = (3J - 2) + J*D.
inline std::string rlck_interconnect_netlist(int junctions, int stub_depth,
                                             unsigned seed = 11) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto logu = [&](double lo, double hi) {
    return lo * std::pow(hi / lo, uni(rng));
  };
  std::ostringstream net;
  net << "* synthetic coupled RLCk interconnect, " << junctions
      << " junctions, stub depth " << stub_depth << "\n";

  std::vector<double> inductance(junctions > 1 ? junctions - 1 : 0);
  for (int i = 1; i < junctions; ++i) {
    inductance[i - 1] = logu(2e-12, 6e-12);
    net << "R" << i << " j" << i << " m" << i << " " << num(logu(0.2, 0.6))
        << "\n";
    net << "L" << i << " m" << i << " j" << (i + 1) << " "
        << num(inductance[i - 1]) << "\n";
    net << "Cm" << i << " m" << i << " 0 " << num(logu(1e-15, 3e-15)) << "\n";
  }
  for (int i = 1; i <= junctions; ++i)
    net << "Cj" << i << " j" << i << " 0 " << num(logu(2e-15, 8e-15)) << "\n";
  for (int i = 1; i + 1 < junctions; ++i) {
    const double m = 0.3 * std::sqrt(inductance[i - 1] * inductance[i]);
    net << "K" << i << " L" << i << " L" << (i + 1) << " " << num(m) << "\n";
  }
  // parasitic stub chains hanging off every junction
  for (int i = 1; i <= junctions; ++i) {
    std::string prev = "j" + std::to_string(i);
    for (int d = 1; d <= stub_depth; ++d) {
      const std::string node = "s" + std::to_string(i) + "_" + std::to_string(d);
      net << "Rs" << i << "_" << d << " " << prev << " " << node << " "
          << num(logu(1.0, 5.0)) << "\n";
      net << "Cs" << i << "_" << d << " " << node << " 0 "
          << num(logu(5e-16, 2e-15)) << "\n";
      prev = node;
    }
  }
  net << "Rt1 j1 0 50\n";
  net << "Rt2 j" << junctions << " 0 50\n";
  net << "P1 j1\n";
  net << "P2 j" << junctions << "\n";
  return net.str();
}

/// Convenience sizes: junctions 41, depth 46 gives N = 2007.
inline std::string rlck_line_netlist(int sections, unsigned seed = 11) {
  // keep unit-test fixtures shaped like the big one but smaller
  const int stub_depth = 2;
  return rlck_interconnect_netlist(sections, stub_depth, seed);
}

}  // namespace testsupport

#endif  // MORKIT_TESTS_SUPPORT_HPP
