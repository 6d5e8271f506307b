#include "morkit/truncation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <future>
#include <vector>

#include "morkit/errors.hpp"

namespace morkit {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

OrderRule OrderRule::fixed_order(Index r) {
  if (r < 1) throw Error("target order must be at least 1");
  OrderRule rule;
  rule.kind = Kind::FixedOrder;
  rule.r = r;
  return rule;
}

OrderRule OrderRule::error_threshold(double epsilon) {
  if (!(epsilon > 0.0)) throw Error("error threshold must be positive");
  OrderRule rule;
  rule.kind = Kind::ErrorThreshold;
  rule.epsilon = epsilon;
  return rule;
}

double HankelSpectrum::tail_sum(Index r) const {
  double sum = 0.0;
  for (Index i = sigma.size() - 1; i >= r; --i) sum += sigma(i);
  return sum;
}

namespace {

Eigen::SparseMatrix<double> dense_to_sparse(const MatrixXd& m) {
  std::vector<Eigen::Triplet<double>> t;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0)
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), m(i, j));
  Eigen::SparseMatrix<double> s(m.rows(), m.cols());
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

// Gramian square root from the dense solution: symmetric eigendecomposition,
// negative round-off eigenvalues clamped, zero columns dropped.
LowRankFactor dense_gramian_factor(const LyapunovProblem& problem,
                                   Index dense_cutoff) {
  const MatrixXd P = solve_dense(problem, dense_cutoff);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(P);
  if (es.info() != Eigen::Success)
    throw NumericalError("Gramian eigendecomposition failed");
  const VectorXd& lambda = es.eigenvalues();  // ascending

  Index kept = 0;
  for (Index i = 0; i < lambda.size(); ++i)
    if (lambda(i) > 0.0) ++kept;

  LowRankFactor f;
  f.Z.resize(P.rows(), kept);
  for (Index i = 0; i < kept; ++i) {
    const Index src = lambda.size() - 1 - i;  // descending
    f.Z.col(i) = es.eigenvectors().col(src) * std::sqrt(lambda(src));
  }
  f.converged = true;
  return f;
}

ReductionMode resolve_mode(const StateSpaceModel& model,
                           const ReductionConfig& cfg) {
  if (cfg.mode != ReductionMode::Auto) return cfg.mode;
  return model.order() > cfg.dense_cutoff ? ReductionMode::LowRank
                                          : ReductionMode::Dense;
}

}  // namespace

std::pair<LowRankFactor, LowRankFactor> gramian_factors(
    const StateSpaceModel& model, const ReductionConfig& cfg) {
  const ReductionMode mode = resolve_mode(model, cfg);

  // The two Gramian solves are independent jobs; each problem owns its own
  // sparse factorizations, so they can run concurrently.
  if (mode == ReductionMode::Dense) {
    auto ctrl = LyapunovProblem::controllability(model);
    auto obs = LyapunovProblem::observability(model);
    auto fut = std::async(std::launch::async, [&] {
      return dense_gramian_factor(ctrl, cfg.dense_cutoff);
    });
    LowRankFactor zq = dense_gramian_factor(obs, cfg.dense_cutoff);
    return {fut.get(), std::move(zq)};
  }

  auto ctrl = LyapunovProblem::controllability(model);
  auto obs = LyapunovProblem::observability(model);
  auto fut = std::async(std::launch::async,
                        [&] { return solve_eks(ctrl, cfg.eks); });
  LowRankFactor zq = solve_eks(obs, cfg.eks);
  return {fut.get(), std::move(zq)};
}

BalanceSvd balance_svd(const LowRankFactor& Zp, const LowRankFactor& Zq) {
  if (Zp.Z.rows() != Zq.Z.rows())
    throw DimensionError("Gramian factors have mismatched row dimension");

  BalanceSvd out;
  if (Zp.rank() == 0 || Zq.rank() == 0) return out;  // empty spectrum

  const MatrixXd product = Zq.Z.transpose() * Zp.Z;
  if (product.norm() == 0.0) return out;  // unreachable/unobservable

  Eigen::BDCSVD<MatrixXd> svd(product,
                              Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.spectrum.sigma = svd.singularValues();
  return out;
}

Eigen::Index select_order(const HankelSpectrum& spectrum,
                          const OrderRule& rule) {
  const Index count = spectrum.count();
  if (count == 0)
    throw Error("empty Hankel spectrum (unreachable or unobservable system)");
  const VectorXd& sigma = spectrum.sigma;

  Index r;
  if (rule.kind == OrderRule::Kind::FixedOrder) {
    r = std::min(rule.r, count);
  } else {
    // smallest r with 2 * tail <= eps; the factor 2 gives the classical
    // certified bound on ||H - Ht||_inf
    r = count;
    double tail = 0.0;
    while (r >= 1 && 2.0 * (tail + sigma(r - 1)) <= rule.epsilon) {
      tail += sigma(r - 1);
      --r;
    }
    if (r < 1) r = 1;
  }

  // keep both members of a tied pair at the boundary
  const double tie = 1e-12 * sigma(0);
  const double degenerate = 1e-14 * sigma(0);
  while (r < count && sigma(r - 1) - sigma(r) <= tie && sigma(r) > degenerate)
    ++r;
  return r;
}

Rom build_rom(const StateSpaceModel& model, const LowRankFactor& Zp,
              const LowRankFactor& Zq, const BalanceSvd& balance,
              Eigen::Index r) {
  const Index count = balance.spectrum.count();
  if (r < 1 || r > count)
    throw DimensionError("requested order " + std::to_string(r) +
                         " is outside the spectrum size " +
                         std::to_string(count));
  const VectorXd& sigma = balance.spectrum.sigma;
  if (!(sigma(r - 1) > 0.0) || sigma(r - 1) < 1e-14 * sigma(0))
    throw NumericalError(
        "balancing is ill-conditioned at order " + std::to_string(r) +
        " (sigma_r/sigma_1 = " + std::to_string(sigma(r - 1) / sigma(0)) +
        "); use a smaller rom order");

  const VectorXd s_invsqrt = sigma.head(r).array().rsqrt();
  Rom rom;
  rom.transform.T =
      s_invsqrt.asDiagonal() * (Zq.Z * balance.U.leftCols(r)).transpose();
  rom.transform.Tinv = (Zp.Z * balance.V.leftCols(r)) * s_invsqrt.asDiagonal();

  // Renormalize the pair so T * Tinv = I exactly; this multiplies Tinv by an
  // r x r similarity and leaves the ROM transfer function unchanged.
  MatrixXd D = rom.transform.T * rom.transform.Tinv;
  if (!D.allFinite())
    throw NumericalError("balancing transform is not finite");
  // Tinv <- Tinv D^{-1}, i.e. solve D' Y' = Tinv'.
  Eigen::PartialPivLU<MatrixXd> lu(D.transpose());
  rom.transform.Tinv =
      lu.solve(rom.transform.Tinv.transpose()).transpose().eval();

  const double dev = (rom.transform.T * rom.transform.Tinv -
                      MatrixXd::Identity(r, r))
                         .cwiseAbs()
                         .maxCoeff();
  if (!(dev <= 1e-8))
    throw NumericalError(
        "balancing transform lost bi-orthogonality (deviation " +
        std::to_string(dev) + ")");

  const MatrixXd& T = rom.transform.T;
  const MatrixXd& Tinv = rom.transform.Tinv;
  rom.Gt.noalias() = T * (model.G * Tinv);
  rom.Ct.noalias() = T * (model.C * Tinv);
  rom.Bt.noalias() = T * model.B;
  rom.Lt.noalias() = model.L * Tinv;
  rom.spectrum = balance.spectrum;
  return rom;
}

StateSpaceModel Rom::to_state_space_model() const {
  StateSpaceModel m;
  m.C = dense_to_sparse(Ct);
  m.G = dense_to_sparse(Gt);
  m.B = Bt;
  m.L = Lt;
  m.n = order();
  m.m = 0;
  return m;
}

Rom reduce(const StateSpaceModel& model, const ReductionConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const ReductionMode mode = resolve_mode(model, cfg);

  auto [zp, zq] = gramian_factors(model, cfg);
  BalanceSvd balance = balance_svd(zp, zq);
  const Index r = select_order(balance.spectrum, cfg.rule);
  Rom rom = build_rom(model, zp, zq, balance, r);

  rom.provenance.mode =
      mode == ReductionMode::Dense ? "dense" : "lowrank";
  rom.provenance.original_order = model.order();
  rom.provenance.rom_order = r;
  rom.provenance.eks_iterations_p = zp.iterations;
  rom.provenance.eks_iterations_q = zq.iterations;
  rom.provenance.eks_residual_p = zp.residual;
  rom.provenance.eks_residual_q = zq.residual;
  rom.provenance.eks_converged = zp.converged && zq.converged;
  rom.provenance.peak_basis = std::max(zp.basis_size, zq.basis_size);
  rom.provenance.residual_history_p = zp.residual_history;
  rom.provenance.residual_history_q = zq.residual_history;
  rom.provenance.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rom;
}

}  // namespace morkit
