#ifndef MORKIT_CONFIG_HPP
#define MORKIT_CONFIG_HPP

#include <set>
#include <string>

#include "morkit/analysis.hpp"
#include "morkit/truncation.hpp"

namespace morkit {

/// One pipeline run described by a flat key=value file ('#' starts a
/// comment). Exactly one input form (netlist= or the four matrix_* keys) and
/// exactly one order rule (epsilon= or rom_order=) must be present.
///
/// Keys: netlist, matrix_g, matrix_c, matrix_b, matrix_l, mode, epsilon,
/// rom_order, dense_cutoff, eks_tol, eks_maxiter, sweep_start_hz,
/// sweep_stop_hz, sweep_points, sweep_scale, z0, analyses, transient_dt,
/// transient_horizon, outdir.
struct RunConfig {
  // input (exactly one form)
  std::string netlist;
  ModelPaths matrices;
  bool has_netlist_input = false;
  bool has_matrix_input = false;

  ReductionMode mode = ReductionMode::Auto;
  OrderRule rule;
  Eigen::Index dense_cutoff = 5000;
  EksOptions eks;

  double sweep_start_hz = 1e8;
  double sweep_stop_hz = 1e11;
  Eigen::Index sweep_points = 201;
  SweepScale sweep_scale = SweepScale::Log;
  double z0 = 50.0;

  std::set<std::string> analyses = {"dc", "sp"};
  double transient_dt = 0.0;
  double transient_horizon = 0.0;

  std::string outdir = "out";

  ReductionConfig reduction_config() const;
  FrequencySweep sweep() const;
  bool operator==(const RunConfig& other) const;
};

/// Parses and validates a config file; unknown keys are errors.
RunConfig load_config(const std::string& path);

/// Parses config text (same grammar as load_config).
RunConfig parse_config(const std::string& text);

/// Renders the effective configuration back to config-file text; reloading
/// the dump reproduces the RunConfig exactly.
std::string dump_config(const RunConfig& cfg);

}  // namespace morkit

#endif  // MORKIT_CONFIG_HPP
