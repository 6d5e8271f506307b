#ifndef MORKIT_TRUNCATION_HPP
#define MORKIT_TRUNCATION_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "morkit/eks.hpp"
#include "morkit/state_space.hpp"

namespace morkit {

enum class ReductionMode { Dense, LowRank, Auto };

/// Either an explicit target order r or an error threshold eps on the
/// truncated Hankel tail (2 * sum of truncated values <= eps).
struct OrderRule {
  enum class Kind { FixedOrder, ErrorThreshold };
  Kind kind = Kind::ErrorThreshold;
  Eigen::Index r = 0;
  double epsilon = 0.0;

  static OrderRule fixed_order(Eigen::Index r);
  static OrderRule error_threshold(double epsilon);
};

struct ReductionConfig {
  ReductionMode mode = ReductionMode::Auto;
  OrderRule rule = OrderRule::error_threshold(1e-6);
  Eigen::Index dense_cutoff = 5000;  // Auto switches to LowRank above this
  EksOptions eks;
};

/// Hankel singular values, descending.
struct HankelSpectrum {
  Eigen::VectorXd sigma;

  Eigen::Index count() const { return sigma.size(); }
  /// sum of sigma_i for i > r (0-based tail after the first r values).
  double tail_sum(Eigen::Index r) const;
};

/// Petrov-Galerkin projection pair with T * Tinv = I_r.
struct BalancingTransform {
  Eigen::MatrixXd T;     // r x N
  Eigen::MatrixXd Tinv;  // N x r
};

struct RomProvenance {
  std::string mode;  // "dense" or "lowrank"
  Eigen::Index original_order = 0;
  Eigen::Index rom_order = 0;
  int eks_iterations_p = 0, eks_iterations_q = 0;
  double eks_residual_p = 0.0, eks_residual_q = 0.0;
  bool eks_converged = true;
  Eigen::Index peak_basis = 0;
  double wall_time_s = 0.0;
  std::vector<double> residual_history_p, residual_history_q;
};

/// Reduced quadruple plus the balancing data that produced it.
struct Rom {
  Eigen::MatrixXd Gt, Ct;  // r x r
  Eigen::MatrixXd Bt;      // r x p
  Eigen::MatrixXd Lt;      // q x r
  HankelSpectrum spectrum;
  BalancingTransform transform;
  RomProvenance provenance;

  Eigen::Index order() const { return Gt.rows(); }
  /// Wraps the reduced matrices as a StateSpaceModel so the analysis
  /// operations apply uniformly to originals and ROMs.
  StateSpaceModel to_state_space_model() const;
};

/// Square-root Gramian factors Z_P, Z_Q: dense mode solves both equations
/// exactly and factors via symmetric eigendecomposition (negative round-off
/// eigenvalues clamped to zero); low-rank mode runs the extended Krylov
/// solver on each. The two solves run as independent concurrent jobs.
std::pair<LowRankFactor, LowRankFactor> gramian_factors(
    const StateSpaceModel& model, const ReductionConfig& cfg);

struct BalanceSvd {
  Eigen::MatrixXd U, V;
  HankelSpectrum spectrum;
};

/// Thin SVD of Z_Q' Z_P. An all-zero product (unreachable or unobservable
/// system) yields an empty spectrum.
BalanceSvd balance_svd(const LowRankFactor& Zp, const LowRankFactor& Zq);

/// Applies the order rule to the spectrum: explicit r is clamped to the
/// spectrum length; the threshold rule picks the smallest r with
/// 2 * tail_sum(r) <= eps (never below 1). Ties at the truncation boundary
/// keep both values to avoid splitting an invariant pair.
Eigen::Index select_order(const HankelSpectrum& spectrum, const OrderRule& rule);

/// Projection step: T = S_r^{-1/2} U_r' Z_Q', Tinv = Z_P V_r S_r^{-1/2}, then
/// Gt = T G Tinv, Ct = T C Tinv, Bt = T B, Lt = L Tinv. The pair is
/// renormalized so T * Tinv = I_r holds to machine precision (a similarity
/// on the reduced state, so the ROM transfer function is unchanged).
/// Refuses r with sigma_r < 1e-14 * sigma_1.
Rom build_rom(const StateSpaceModel& model, const LowRankFactor& Zp,
              const LowRankFactor& Zq, const BalanceSvd& balance,
              Eigen::Index r);

/// gramian_factors -> balance_svd -> select_order -> build_rom, with
/// provenance (mode, iterations, residuals, wall time, peak basis size).
Rom reduce(const StateSpaceModel& model, const ReductionConfig& cfg);

}  // namespace morkit

#endif  // MORKIT_TRUNCATION_HPP
