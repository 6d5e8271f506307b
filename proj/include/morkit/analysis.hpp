#ifndef MORKIT_ANALYSIS_HPP
#define MORKIT_ANALYSIS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "morkit/state_space.hpp"

namespace morkit {

enum class SweepScale { Linear, Log };

struct FrequencySweep {
  Eigen::VectorXd points_hz;  // strictly increasing, all > 0
  SweepScale scale = SweepScale::Log;

  static FrequencySweep log_spaced(double start_hz, double stop_hz,
                                   Eigen::Index points);
  static FrequencySweep linear_spaced(double start_hz, double stop_hz,
                                      Eigen::Index points);
  /// 201 log points over 0.1 - 100 GHz, the default report sweep.
  static FrequencySweep report_default();

  void validate() const;
  Eigen::Index size() const { return points_hz.size(); }
};

struct SParameterSet {
  Eigen::VectorXd freqs_hz;
  std::vector<Eigen::MatrixXcd> data;  // p x p per frequency
  double z0 = 50.0;

  Eigen::Index ports() const { return data.empty() ? 0 : data.front().rows(); }
};

struct TransientResult {
  Eigen::VectorXd times;    // uniform grid starting at 0
  Eigen::MatrixXd outputs;  // q x times
  double dt = 0.0;
};

/// MRE / MAX_RE of one analysis, in percent.
struct ErrorStats {
  double mre_pct = 0.0;
  double max_re_pct = 0.0;
};

/// H(s) = L (sC - G)^{-1} B via one sparse factorization and p solves.
Eigen::MatrixXcd transfer_function(const StateSpaceModel& model,
                                   std::complex<double> s);

/// DC port matrix H(0) = -L G^{-1} B. A structurally singular G produces a
/// diagnostic naming states with no resistive/inductive path to ground.
Eigen::MatrixXd dc_solve(const StateSpaceModel& model);

/// S = (Z - z0 I)(Z + z0 I)^{-1} with Z = H(j 2 pi f), computed per frequency
/// from the bordered system [sC - G, -B; L, z0 I] (same S, but conditioned by
/// the terminated network rather than the open-circuit impedance). Frequency
/// points are evaluated concurrently; assembly is frequency-ordered.
SParameterSet sp_sweep(const StateSpaceModel& model, const FrequencySweep& sweep,
                       double z0);

/// Backward-Euler integration of C x' = G x + B u from x(0) = 0:
///   (C/dt - G) x_{k+1} = (C/dt) x_k + B u_{k+1},   y_k = L x_k.
/// `input` holds one column per grid point (p x (steps+1) or wider).
TransientResult transient(const StateSpaceModel& model,
                          const Eigen::MatrixXd& input, double dt,
                          double horizon);

/// Relative errors per sample e = |test - ref| / max(|ref|, 1e-12);
/// MRE = 100 * mean, MAX_RE = 100 * max over all ports and samples.
ErrorStats compare(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& test);
ErrorStats compare(const SParameterSet& reference, const SParameterSet& test);
ErrorStats compare(const TransientResult& reference, const TransientResult& test);

/// Largest singular value of S over the sweep; passive networks stay <= 1
/// (flagged, never repaired).
double max_passivity_violation(const SParameterSet& sparams);

/// Largest |S - S'| entry over the sweep (reciprocity check).
double max_reciprocity_asymmetry(const SParameterSet& sparams);

}  // namespace morkit

#endif  // MORKIT_ANALYSIS_HPP
