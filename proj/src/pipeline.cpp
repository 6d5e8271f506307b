#include "morkit/pipeline.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "morkit/errors.hpp"
#include "morkit/matrix_market.hpp"
#include "morkit/netlist.hpp"
#include "morkit/touchstone.hpp"

namespace morkit {

namespace fs = std::filesystem;

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

class StageLog {
 public:
  StageLog(std::ofstream& file, std::ostream* echo) : file_(file), echo_(echo) {}

  void line(const std::string& text) {
    file_ << text << '\n';
    file_.flush();
    if (echo_) *echo_ << text << '\n';
  }

  template <typename F>
  auto stage(const std::string& name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        line("stage " + name + ": " + fmt6(elapsed(t0)) + " s");
      } else {
        auto result = body();
        line("stage " + name + ": " + fmt6(elapsed(t0)) + " s");
        return result;
      }
    } catch (const Error& e) {
      line("stage " + name + " FAILED: " + e.what());
      throw Error("stage " + name + ": " + e.what());
    }
  }

 private:
  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
  std::ofstream& file_;
  std::ostream* echo_;
};

std::string model_label(const RunConfig& cfg) {
  const std::string& path = cfg.has_netlist_input ? cfg.netlist : cfg.matrices.g;
  return fs::path(path).stem().string();
}

void write_provenance(const std::string& path, const RomProvenance& prov) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write provenance file: " + path);
  out << "original_order=" << prov.original_order << '\n';
  out << "rom_order=" << prov.rom_order << '\n';
  out << "mode=" << prov.mode << '\n';
  out << "eks_iterations=" << prov.eks_iterations_p << ','
      << prov.eks_iterations_q << '\n';
  out << "residuals=" << fmt6(prov.eks_residual_p) << ','
      << fmt6(prov.eks_residual_q) << '\n';
  out << "eks_converged=" << (prov.eks_converged ? "yes" : "no") << '\n';
  out << "peak_basis=" << prov.peak_basis << '\n';
  out << "wall_time_s=" << fmt6(prov.wall_time_s) << '\n';
  out << "peak_mem_estimate_gb=" << fmt6(peak_memory_gb()) << '\n';
}

void write_residual_csv(const std::string& path,
                        const std::vector<double>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write residual history: " + path);
  out << "iteration,residual\n";
  for (size_t i = 0; i < history.size(); ++i)
    out << (i + 1) << ',' << fmt6(history[i]) << '\n';
}

void write_plot_csv(const std::string& path, const SParameterSet& sparams,
                    Eigen::Index i, Eigen::Index j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot data: " + path);
  out << "freq_hz,mag_db,phase_deg\n";
  for (Eigen::Index f = 0; f < sparams.freqs_hz.size(); ++f) {
    const std::complex<double> v = sparams.data[static_cast<size_t>(f)](i, j);
    const double mag_db = 20.0 * std::log10(std::max(std::abs(v), 1e-300));
    const double phase_deg = std::arg(v) * 180.0 / std::numbers::pi;
    out << fmt6(sparams.freqs_hz(f)) << ',' << fmt6(mag_db) << ','
        << fmt6(phase_deg) << '\n';
  }
}

void write_transient_csv(const std::string& path, const TransientResult& tr) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write transient data: " + path);
  out << "time_s";
  for (Eigen::Index i = 0; i < tr.outputs.rows(); ++i)
    out << ",y" << (i + 1);
  out << '\n';
  for (Eigen::Index k = 0; k < tr.times.size(); ++k) {
    out << fmt6(tr.times(k));
    for (Eigen::Index i = 0; i < tr.outputs.rows(); ++i)
      out << ',' << fmt6(tr.outputs(i, k));
    out << '\n';
  }
}

}  // namespace

double peak_memory_gb() {
  struct rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  // ru_maxrss is in KiB on Linux
  return static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);
}

std::string report_csv_text(const ErrorReport& report) {
  std::ostringstream out;
  out << "model,rom_order,reduction_pct,dc_mre,dc_max_re,sp_mre,sp_max_re,"
         "reduction_time_s,memory_gb\n";
  out << report.model << ',' << report.rom_order << ','
      << fmt6(report.reduction_pct) << ',';
  if (report.dc)
    out << fmt6(report.dc->mre_pct) << ',' << fmt6(report.dc->max_re_pct);
  else
    out << ',';
  out << ',';
  if (report.sp)
    out << fmt6(report.sp->mre_pct) << ',' << fmt6(report.sp->max_re_pct);
  else
    out << ',';
  out << ',' << fmt6(report.reduction_time_s) << ',' << fmt6(report.memory_gb)
      << '\n';
  return out.str();
}

RunArtifacts run(const RunConfig& cfg, std::ostream* verbose) {
  RunArtifacts artifacts;
  artifacts.outdir = cfg.outdir;

  // fail fast before any compute
  std::error_code ec;
  fs::create_directories(cfg.outdir, ec);
  const fs::path outdir(cfg.outdir);
  {
    const fs::path probe = outdir / ".write_probe";
    std::ofstream test(probe);
    if (!test) throw IoError("output directory not writable: " + cfg.outdir);
    test.close();
    fs::remove(probe, ec);
  }

  std::ofstream log_file(outdir / "run.log");
  if (!log_file) throw IoError("cannot open log in " + cfg.outdir);
  StageLog log(log_file, verbose);
  artifacts.log_file = (outdir / "run.log").string();

  log.line("config:");
  {
    std::istringstream dump(dump_config(cfg));
    std::string line;
    while (std::getline(dump, line)) log.line("  " + line);
  }

  StateSpaceModel model = log.stage("ingest", [&] {
    if (cfg.has_netlist_input) {
      std::ifstream in(cfg.netlist);
      if (!in) throw IoError("cannot open netlist: " + cfg.netlist);
      RlckNetlist net = parse_netlist(in);
      return to_state_space(assemble_mna(net));
    }
    return load_matrices(cfg.matrices);
  });
  log.line("model: N = " + std::to_string(model.order()) + " (n = " +
           std::to_string(model.n) + ", m = " + std::to_string(model.m) +
           "), p = " + std::to_string(model.inputs()) + ", q = " +
           std::to_string(model.outputs()) + ", regularized nodes = " +
           std::to_string(model.regularized_count));

  Rom rom = log.stage("reduce", [&] { return reduce(model, cfg.reduction_config()); });
  log.line("reduction: order " + std::to_string(rom.provenance.original_order) +
           " -> " + std::to_string(rom.provenance.rom_order) + " (" +
           fmt6(100.0 * (1.0 - static_cast<double>(rom.order()) /
                                   static_cast<double>(model.order()))) +
           "%), mode " + rom.provenance.mode + ", wall time " +
           fmt6(rom.provenance.wall_time_s) + " s");
  if (rom.provenance.mode == "lowrank") {
    log.line("eks: iterations " +
             std::to_string(rom.provenance.eks_iterations_p) + "/" +
             std::to_string(rom.provenance.eks_iterations_q) + ", residuals " +
             fmt6(rom.provenance.eks_residual_p) + "/" +
             fmt6(rom.provenance.eks_residual_q) + ", peak basis " +
             std::to_string(rom.provenance.peak_basis));
    if (!rom.provenance.eks_converged)
      log.line("warning: EKS did not reach its tolerance; ROM may be "
               "less accurate");
  }

  // Commit reduction artifacts before any verification.
  log.stage("export-rom", [&] {
    const char* names[] = {"rom_G.mtx", "rom_C.mtx", "rom_B.mtx", "rom_L.mtx"};
    const Eigen::MatrixXd* mats[] = {&rom.Gt, &rom.Ct, &rom.Bt, &rom.Lt};
    for (int i = 0; i < 4; ++i) {
      write_matrix_market((outdir / names[i]).string(), *mats[i]);
      artifacts.rom_matrix_files.push_back(names[i]);
    }
    write_provenance((outdir / "provenance.txt").string(), rom.provenance);
    artifacts.provenance_file = (outdir / "provenance.txt").string();
    if (rom.provenance.mode == "lowrank") {
      write_residual_csv((outdir / "eks_residuals_p.csv").string(),
                         rom.provenance.residual_history_p);
      write_residual_csv((outdir / "eks_residuals_q.csv").string(),
                         rom.provenance.residual_history_q);
    }
  });

  ErrorReport report;
  report.model = model_label(cfg);
  report.original_order = model.order();
  report.rom_order = rom.order();
  report.reduction_pct = 100.0 * (1.0 - static_cast<double>(rom.order()) /
                                            static_cast<double>(model.order()));
  report.reduction_time_s = rom.provenance.wall_time_s;

  const StateSpaceModel rom_model = rom.to_state_space_model();

  if (cfg.analyses.count("dc")) {
    const Eigen::MatrixXd dc_orig =
        log.stage("dc-original", [&] { return dc_solve(model); });
    const Eigen::MatrixXd dc_rom =
        log.stage("dc-rom", [&] { return dc_solve(rom_model); });
    report.dc = compare(dc_orig, dc_rom);
    log.line("dc: MRE " + fmt6(report.dc->mre_pct) + "%, MAX_RE " +
             fmt6(report.dc->max_re_pct) + "%");
  }

  if (cfg.analyses.count("sp")) {
    const FrequencySweep sweep = cfg.sweep();
    // Full-model sweeps above the dense cutoff are considered infeasible;
    // fall back to a tighter reference ROM as the comparison baseline.
    SParameterSet sp_ref;
    if (model.order() <= cfg.dense_cutoff) {
      sp_ref = log.stage("sp-original",
                         [&] { return sp_sweep(model, sweep, cfg.z0); });
    } else {
      sp_ref = log.stage("sp-reference-rom", [&] {
        ReductionConfig ref_cfg = cfg.reduction_config();
        ref_cfg.rule = OrderRule::fixed_order(
            std::min<Eigen::Index>(4 * rom.order(), rom.spectrum.count()));
        ref_cfg.eks.tol = std::min(1e-10, ref_cfg.eks.tol * 0.01);
        const Rom reference = reduce(model, ref_cfg);
        log.line("reference rom order: " + std::to_string(reference.order()));
        return sp_sweep(reference.to_state_space_model(), sweep, cfg.z0);
      });
    }
    const SParameterSet sp_rom =
        log.stage("sp-rom", [&] { return sp_sweep(rom_model, sweep, cfg.z0); });
    report.sp = compare(sp_ref, sp_rom);
    log.line("sp: MRE " + fmt6(report.sp->mre_pct) + "%, MAX_RE " +
             fmt6(report.sp->max_re_pct) + "%");
    const double passivity = max_passivity_violation(sp_rom);
    if (passivity > 1.0 + 1e-6)
      log.line("warning: ROM S-parameters exceed passivity (max singular "
               "value " + fmt6(passivity) + ")");

    log.stage("export-sp", [&] {
      const std::string orig_name =
          touchstone_filename("original", sp_ref.ports());
      const std::string rom_name = touchstone_filename("rom", sp_rom.ports());
      write_touchstone((outdir / orig_name).string(), sp_ref);
      write_touchstone((outdir / rom_name).string(), sp_rom);
      artifacts.touchstone_files = {orig_name, rom_name};
      for (Eigen::Index i = 0; i < sp_ref.ports(); ++i)
        for (Eigen::Index j = 0; j < sp_ref.ports(); ++j) {
          const std::string suffix =
              "S" + std::to_string(i + 1) + std::to_string(j + 1);
          write_plot_csv((outdir / ("plot_" + suffix + "_original.csv")).string(),
                         sp_ref, i, j);
          write_plot_csv((outdir / ("plot_" + suffix + "_rom.csv")).string(),
                         sp_rom, i, j);
        }
    });
  }

  if (cfg.analyses.count("transient")) {
    const Eigen::Index steps = static_cast<Eigen::Index>(
        std::llround(cfg.transient_horizon / cfg.transient_dt));
    const Eigen::MatrixXd step_input =
        Eigen::MatrixXd::Ones(model.inputs(), steps + 1);  // unit step
    const TransientResult tr_orig = log.stage("transient-original", [&] {
      return transient(model, step_input, cfg.transient_dt,
                       cfg.transient_horizon);
    });
    const TransientResult tr_rom = log.stage("transient-rom", [&] {
      return transient(rom_model, step_input, cfg.transient_dt,
                       cfg.transient_horizon);
    });
    report.trans = compare(tr_orig, tr_rom);
    log.line("transient: MRE " + fmt6(report.trans->mre_pct) + "%, MAX_RE " +
             fmt6(report.trans->max_re_pct) + "%");
    log.stage("export-transient", [&] {
      write_transient_csv((outdir / "transient_original.csv").string(), tr_orig);
      write_transient_csv((outdir / "transient_rom.csv").string(), tr_rom);
    });
  }

  report.memory_gb = peak_memory_gb();
  log.stage("report", [&] {
    std::ofstream out(outdir / "report.csv");
    if (!out) throw IoError("cannot write report.csv");
    out << report_csv_text(report);
  });
  artifacts.report_csv = (outdir / "report.csv").string();
  artifacts.report = report;
  artifacts.provenance = rom.provenance;
  log.line("done");
  return artifacts;
}

}  // namespace morkit
