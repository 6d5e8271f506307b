#include <doctest.h>

#include <random>

#include "morkit/eks.hpp"
#include "morkit/errors.hpp"
#include "support.hpp"

using namespace morkit;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double orthonormality_defect(const MatrixXd& k) {
  return (k.transpose() * k - MatrixXd::Identity(k.cols(), k.cols()))
      .cwiseAbs()
      .maxCoeff();
}

double explicit_residual(const LyapunovProblem& problem, const MatrixXd& p) {
  const MatrixXd a = problem.dense_a();
  const MatrixXd ff = problem.rhs() * problem.rhs().transpose();
  return (a * p + p * a.transpose() + ff).norm() / ff.norm();
}

}  // namespace

TEST_SUITE("eks") {

TEST_CASE("one expansion grows the basis by 2p") {
  std::mt19937 rng(2);
  const MatrixXd a = testsupport::random_stable_dense(rng, 30);
  const MatrixXd f = testsupport::random_matrix(rng, 30, 1);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  CHECK(state.basis_size() == 2);  // [F, A^{-1}F] for p = 1
  CHECK(state.j == 1);
  eks_expand(state, problem);
  CHECK(state.basis_size() == 4);
  CHECK(state.j == 2);
  CHECK(orthonormality_defect(state.K) <= 1e-12);
}

TEST_CASE("invariant subspace deflates without error") {
  // A diagonal and F an eigenvector: the Krylov space is one-dimensional.
  MatrixXd a = MatrixXd::Zero(6, 6);
  for (Index i = 0; i < 6; ++i) a(i, i) = -static_cast<double>(i + 1);
  MatrixXd f = MatrixXd::Zero(6, 1);
  f(2, 0) = 1.0;
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  CHECK(state.basis_size() == 1);  // A^{-1}F collinear with F
  eks_expand(state, problem);
  CHECK(state.basis_size() == 1);  // nothing new; signal for the check
  CHECK(state.stagnated);
  solve_projected(state, problem);
  CHECK(residual_norm(state, problem) <= 1e-12);
  // expanding again from the stagnated state is the error case
  CHECK_THROWS_AS(eks_expand(state, problem), NumericalError);
}

TEST_CASE("basis spans powers of A and A^{-1} applied to F") {
  std::mt19937 rng(9);
  const Eigen::SparseMatrix<double> a_sparse =
      testsupport::random_stable_sparse(rng, 100, 0.3);
  const MatrixXd a = MatrixXd(a_sparse);
  const MatrixXd f = testsupport::random_matrix(rng, 100, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  eks_expand(state, problem);
  eks_expand(state, problem);  // j = 3
  CHECK(state.j == 3);
  CHECK(orthonormality_defect(state.K) <= 1e-12);

  const auto lu = a.partialPivLu();
  std::vector<MatrixXd> members;
  members.push_back(f);                         // A^0 F
  members.push_back(a * f);                     // A F
  members.push_back(a * a * f);                 // A^2 F
  members.push_back(lu.solve(f));               // A^{-1} F
  members.push_back(lu.solve(lu.solve(f)));     // A^{-2} F
  for (const MatrixXd& v : members) {
    const MatrixXd resid = v - state.K * (state.K.transpose() * v);
    CHECK(resid.norm() / v.norm() <= 1e-10);
  }
}

TEST_CASE("projected solve matches the Kronecker oracle at j = 1") {
  std::mt19937 rng(4);
  const MatrixXd a = testsupport::random_stable_dense(rng, 20);
  const MatrixXd f = testsupport::random_matrix(rng, 20, 1);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  solve_projected(state, problem);
  REQUIRE(state.X_small.rows() == 2);
  const MatrixXd oracle =
      testsupport::kron_lyapunov_oracle(state.A_small, state.R_small);
  CHECK(testsupport::rel_error(oracle, state.X_small) < 1e-12);
}

TEST_CASE("full basis reproduces the dense solution") {
  std::mt19937 rng(6);
  const MatrixXd a = testsupport::random_stable_dense(rng, 12);
  const MatrixXd f = testsupport::random_matrix(rng, 12, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  while (state.basis_size() < 12) {
    eks_expand(state, problem);
    if (state.stagnated) break;
  }
  REQUIRE(state.basis_size() == 12);
  solve_projected(state, problem);
  CHECK(residual_norm(state, problem) <= 1e-10);
  const MatrixXd p = state.K * state.X_small * state.K.transpose();
  CHECK(testsupport::rel_error(lyap_dense(a, f), p) < 1e-10);
}

TEST_CASE("symmetric problems give symmetric projected solutions") {
  std::mt19937 rng(8);
  MatrixXd a = testsupport::random_stable_dense(rng, 25);
  a = 0.5 * (a + a.transpose()).eval();
  a -= (a.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff() + 0.3) *
       MatrixXd::Identity(25, 25);
  const MatrixXd f = testsupport::random_matrix(rng, 25, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  eks_expand(state, problem);
  solve_projected(state, problem);
  CHECK((state.X_small - state.X_small.transpose()).cwiseAbs().maxCoeff() <=
        1e-12 * state.X_small.norm());
}

TEST_CASE("factored residual matches the explicitly formed residual") {
  std::mt19937 rng(13);
  const Eigen::SparseMatrix<double> a_sparse =
      testsupport::random_stable_sparse(rng, 80, 0.0);
  const MatrixXd a = MatrixXd(a_sparse);
  const MatrixXd f = testsupport::random_matrix(rng, 80, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);

  EksState state = eks_init(problem);
  CHECK(residual_norm(state, problem) == 1.0);  // no solve yet

  double res_at_1 = 0.0, res_at_5 = 0.0;
  for (int round = 1; round <= 5; ++round) {
    solve_projected(state, problem);
    const double factored = residual_norm(state, problem);
    const MatrixXd p = state.K * state.X_small * state.K.transpose();
    const double explicit_res = explicit_residual(problem, p);
    CHECK(std::abs(factored - explicit_res) <=
          1e-10 + 1e-6 * explicit_res);
    if (round == 1) res_at_1 = factored;
    if (round == 5) res_at_5 = factored;
    if (round < 5) eks_expand(state, problem);
  }
  CHECK(res_at_5 <= res_at_1);
}

TEST_CASE("extract_factor reproduces identity and scalar cases") {
  // X = I means Z Z' = K K'
  std::mt19937 rng(3);
  const MatrixXd a = testsupport::random_stable_dense(rng, 10);
  const MatrixXd f = testsupport::random_matrix(rng, 10, 1);
  const auto problem = LyapunovProblem::from_dense(a, f);
  EksState state = eks_init(problem);
  state.X_small = MatrixXd::Identity(2, 2);
  state.has_solution = true;
  const LowRankFactor factor = extract_factor(state);
  CHECK(testsupport::rel_error(state.K * state.K.transpose(),
                               factor.Z * factor.Z.transpose()) < 1e-13);

  // scalar A = [-1], F = [sqrt(2)]: Z Z' = [1]
  MatrixXd a1(1, 1), f1(1, 1);
  a1 << -1.0;
  f1 << std::sqrt(2.0);
  const LowRankFactor scalar = solve_eks(LyapunovProblem::from_dense(a1, f1));
  CHECK(scalar.converged);
  const MatrixXd p = scalar.Z * scalar.Z.transpose();
  CHECK(p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_eks matches the dense solver on a 200-state problem") {
  std::mt19937 rng(21);
  const Eigen::SparseMatrix<double> a_sparse =
      testsupport::random_stable_sparse(rng, 200, 0.2);
  const MatrixXd a = MatrixXd(a_sparse);
  const MatrixXd f = testsupport::random_matrix(rng, 200, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);

  const LowRankFactor factor = solve_eks(problem);
  CHECK(factor.converged);
  CHECK(factor.residual <= 1e-8);
  CHECK(factor.rank() < 200);
  const MatrixXd p_dense = lyap_dense(a, f);
  CHECK(testsupport::rel_error(p_dense, factor.Z * factor.Z.transpose()) <=
        1e-6);
}

TEST_CASE("A = -I has the closed form P = F F' / 2") {
  std::mt19937 rng(30);
  const MatrixXd f = testsupport::random_matrix(rng, 40, 3);
  const auto problem =
      LyapunovProblem::from_dense(-MatrixXd::Identity(40, 40), f);
  const LowRankFactor factor = solve_eks(problem);
  CHECK(factor.converged);
  CHECK(testsupport::rel_error(0.5 * (f * f.transpose()),
                               factor.Z * factor.Z.transpose()) < 1e-10);
}

TEST_CASE("diagonal A with F = e1 converges immediately") {
  MatrixXd a = MatrixXd::Zero(10, 10);
  for (Index i = 0; i < 10; ++i) a(i, i) = -static_cast<double>(i + 1);
  MatrixXd f = MatrixXd::Zero(10, 1);
  f(0, 0) = 1.0;
  const auto problem = LyapunovProblem::from_dense(a, f);
  const LowRankFactor factor = solve_eks(problem);
  CHECK(factor.converged);
  CHECK(factor.iterations <= 2);  // init plus at most one round
  const MatrixXd oracle = testsupport::kron_lyapunov_oracle(a, f);
  CHECK(testsupport::rel_error(oracle, factor.Z * factor.Z.transpose()) <
        1e-10);
}

TEST_CASE("rank never exceeds the pre-deflation bound") {
  std::mt19937 rng(14);
  const Eigen::SparseMatrix<double> a_sparse =
      testsupport::random_stable_sparse(rng, 120, 0.1);
  const MatrixXd a = MatrixXd(a_sparse);
  const MatrixXd f = testsupport::random_matrix(rng, 120, 3);
  const auto problem = LyapunovProblem::from_dense(a, f);
  const LowRankFactor factor = solve_eks(problem);
  CHECK(factor.rank() <= 2 * 3 * factor.iterations);
  CHECK(factor.rank() <= factor.basis_size);
  CHECK(!factor.residual_history.empty());
}

TEST_CASE("maxiter returns the best factor with a warning flag") {
  std::mt19937 rng(15);
  const Eigen::SparseMatrix<double> a_sparse =
      testsupport::random_stable_sparse(rng, 150, 0.4);
  const MatrixXd a = MatrixXd(a_sparse);
  const MatrixXd f = testsupport::random_matrix(rng, 150, 2);
  const auto problem = LyapunovProblem::from_dense(a, f);
  EksOptions opts;
  opts.maxiter = 2;  // far too few
  const LowRankFactor factor = solve_eks(problem, opts);
  CHECK(!factor.converged);
  CHECK(factor.residual > opts.tol);
  CHECK(factor.rank() > 0);
}

TEST_CASE("EKS handles the circuit operators without forming A") {
  const RlckNetlist net = parse_netlist(testsupport::rlck_line_netlist(60));
  const StateSpaceModel model = to_state_space(assemble_mna(net));
  const auto ctrl = LyapunovProblem::controllability(model);
  const LowRankFactor factor = solve_eks(ctrl);
  CHECK(factor.converged);
  CHECK(factor.residual <= 1e-8);
  CHECK(factor.rank() < model.order() / 2);

  // spot-check against the dense path
  const Eigen::MatrixXd p_dense = solve_dense(ctrl);
  CHECK(testsupport::rel_error(p_dense, factor.Z * factor.Z.transpose()) <=
        1e-6);
}

}  // TEST_SUITE
