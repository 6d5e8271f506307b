#ifndef MORKIT_PIPELINE_HPP
#define MORKIT_PIPELINE_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "morkit/config.hpp"
#include "morkit/truncation.hpp"

namespace morkit {

/// One row of the error-report CSV (model, rom_order, reduction_pct, DC and
/// SP errors, reduction time, memory estimate). Analyses that did not run
/// leave their columns empty.
struct ErrorReport {
  std::string model;
  Eigen::Index original_order = 0;
  Eigen::Index rom_order = 0;
  double reduction_pct = 0.0;
  std::optional<ErrorStats> dc;
  std::optional<ErrorStats> sp;
  std::optional<ErrorStats> trans;  // logged, not part of the CSV schema
  double reduction_time_s = 0.0;
  double memory_gb = 0.0;
};

struct RunArtifacts {
  std::string outdir;
  std::vector<std::string> rom_matrix_files;
  std::vector<std::string> touchstone_files;
  std::string report_csv;
  std::string provenance_file;
  std::string log_file;
  ErrorReport report;
  RomProvenance provenance;
};

/// The full workflow: ingest -> reduce -> commit ROM artifacts -> analyze
/// original and ROM -> compare -> write report. ROM matrices and provenance
/// are written before any verification step, so a later analysis failure
/// leaves them on disk. Stage failures are rethrown with the stage name.
RunArtifacts run(const RunConfig& cfg, std::ostream* verbose = nullptr);

/// Serializes the report row with 6 significant digits (deterministic for a
/// fixed config, apart from the wall-time and memory columns).
std::string report_csv_text(const ErrorReport& report);

/// Current peak resident memory of this process, in GB (informational).
double peak_memory_gb();

}  // namespace morkit

#endif  // MORKIT_PIPELINE_HPP
