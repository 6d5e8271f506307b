#include "morkit/analysis.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "morkit/errors.hpp"

namespace morkit {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

FrequencySweep FrequencySweep::log_spaced(double start_hz, double stop_hz,
                                          Index points) {
  FrequencySweep sweep;
  sweep.scale = SweepScale::Log;
  sweep.points_hz.resize(points);
  if (points == 1) {
    sweep.points_hz(0) = start_hz;
  } else {
    const double l0 = std::log10(start_hz), l1 = std::log10(stop_hz);
    for (Index i = 0; i < points; ++i)
      sweep.points_hz(i) =
          std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) /
                                  static_cast<double>(points - 1));
  }
  sweep.validate();
  return sweep;
}

FrequencySweep FrequencySweep::linear_spaced(double start_hz, double stop_hz,
                                             Index points) {
  FrequencySweep sweep;
  sweep.scale = SweepScale::Linear;
  sweep.points_hz.resize(points);
  if (points == 1) {
    sweep.points_hz(0) = start_hz;
  } else {
    for (Index i = 0; i < points; ++i)
      sweep.points_hz(i) = start_hz + (stop_hz - start_hz) *
                                          static_cast<double>(i) /
                                          static_cast<double>(points - 1);
  }
  sweep.validate();
  return sweep;
}

FrequencySweep FrequencySweep::report_default() {
  return log_spaced(1e8, 1e11, 201);
}

void FrequencySweep::validate() const {
  if (points_hz.size() == 0) throw Error("frequency sweep is empty");
  for (Index i = 0; i < points_hz.size(); ++i) {
    if (!(points_hz(i) > 0.0))
      throw Error("sweep frequencies must be positive");
    if (i > 0 && !(points_hz(i) > points_hz(i - 1)))
      throw Error("sweep frequencies must be strictly increasing");
  }
}

namespace {

SparseC shifted_pencil(const StateSpaceModel& model, Complex s) {
  return SparseC(s * model.C.cast<Complex>()) -
         SparseC(model.G.cast<Complex>());
}

std::string complex_str(Complex s) {
  std::ostringstream os;
  os << s.real() << (s.imag() < 0 ? " - " : " + ") << std::abs(s.imag())
     << "i";
  return os.str();
}

}  // namespace

Eigen::MatrixXcd transfer_function(const StateSpaceModel& model, Complex s) {
  SparseC A = shifted_pencil(model, s);
  A.makeCompressed();
  Eigen::SparseLU<SparseC> lu(A);
  if (lu.info() != Eigen::Success)
    throw NumericalError("(sC - G) is singular at s = " + complex_str(s) +
                         " rad/s");
  const MatrixXcd X = lu.solve(model.B.cast<Complex>());
  return model.L.cast<Complex>() * X;
}

namespace {

// States with no resistive/inductive tie to ground make G structurally
// singular; report them by graph reachability from the rows that carry a
// ground connection (nonzero row sum).
std::string floating_state_diagnostic(const StateSpaceModel& model) {
  const auto& G = model.G;
  const Index N = G.rows();
  VectorXd row_sum = VectorXd::Zero(N);
  double scale = 0.0;
  for (int k = 0; k < G.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, k); it; ++it) {
      row_sum(it.row()) += it.value();
      scale = std::max(scale, std::abs(it.value()));
    }
  if (scale == 0.0) return "G is identically zero";

  std::vector<char> reached(N, 0);
  std::vector<Index> queue;
  for (Index i = 0; i < N; ++i)
    if (std::abs(row_sum(i)) > 1e-12 * scale) {
      reached[i] = 1;
      queue.push_back(i);
    }
  // undirected reachability over the sparsity pattern
  std::vector<std::vector<Index>> adj(N);
  for (int k = 0; k < G.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(G, k); it; ++it)
      if (it.row() != it.col()) {
        adj[it.row()].push_back(it.col());
        adj[it.col()].push_back(it.row());
      }
  while (!queue.empty()) {
    const Index v = queue.back();
    queue.pop_back();
    for (Index w : adj[v])
      if (!reached[w]) {
        reached[w] = 1;
        queue.push_back(w);
      }
  }

  std::ostringstream os;
  Index count = 0;
  for (Index i = 0; i < N && count < 20; ++i)
    if (!reached[i]) {
      os << (count ? ", " : "") << i;
      ++count;
    }
  if (count == 0) return "no floating states detected (numerically singular G)";
  return "states with no conduction path to ground: " + os.str();
}

}  // namespace

Eigen::MatrixXd dc_solve(const StateSpaceModel& model) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(model.G);
  if (lu.info() != Eigen::Success)
    throw NumericalError("DC system is singular; " +
                         floating_state_diagnostic(model));
  return -model.L * lu.solve(model.B);
}

namespace {

MatrixXcd s_params_at(const StateSpaceModel& model, double f_hz, double z0) {
  const Index N = model.order();
  const Index p = model.inputs();
  const Complex s(0.0, 2.0 * std::numbers::pi * f_hz);

  // bordered system [sC - G, -B; L, z0 I] [Y; W] = [0; I]
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(model.C.nonZeros() + model.G.nonZeros() +
            static_cast<size_t>(2 * N * p + p));
  for (int k = 0; k < model.C.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(model.C, k); it; ++it)
      t.emplace_back(it.row(), it.col(), s * it.value());
  for (int k = 0; k < model.G.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(model.G, k); it; ++it)
      t.emplace_back(it.row(), it.col(), Complex(-it.value(), 0.0));
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < N; ++i) {
      if (model.B(i, j) != 0.0)
        t.emplace_back(static_cast<int>(i), static_cast<int>(N + j),
                       Complex(-model.B(i, j), 0.0));
      if (model.L(j, i) != 0.0)
        t.emplace_back(static_cast<int>(N + j), static_cast<int>(i),
                       Complex(model.L(j, i), 0.0));
    }
  for (Index j = 0; j < p; ++j)
    t.emplace_back(static_cast<int>(N + j), static_cast<int>(N + j),
                   Complex(z0, 0.0));

  SparseC K(N + p, N + p);
  K.setFromTriplets(t.begin(), t.end());
  K.makeCompressed();
  Eigen::SparseLU<SparseC> lu(K);
  if (lu.info() != Eigen::Success)
    throw NumericalError("S-parameter system (Z + z0 I) is singular at f = " +
                         std::to_string(f_hz) + " Hz");

  MatrixXcd rhs = MatrixXcd::Zero(N + p, p);
  rhs.bottomRows(p).setIdentity();
  const MatrixXcd sol = lu.solve(rhs);
  // S = (Z - z0 I)(Z + z0 I)^{-1} = I - 2 z0 (Z + z0 I)^{-1}
  return MatrixXcd::Identity(p, p) - 2.0 * z0 * sol.bottomRows(p);
}

}  // namespace

SParameterSet sp_sweep(const StateSpaceModel& model, const FrequencySweep& sweep,
                       double z0) {
  sweep.validate();
  if (model.inputs() != model.outputs())
    throw DimensionError("S-parameters need p = q, got p = " +
                         std::to_string(model.inputs()) + ", q = " +
                         std::to_string(model.outputs()));
  if (!(z0 > 0.0)) throw Error("reference impedance must be positive");

  SParameterSet out;
  out.freqs_hz = sweep.points_hz;
  out.z0 = z0;
  const Index npts = sweep.size();
  out.data.resize(static_cast<size_t>(npts));

  const unsigned hw = std::thread::hardware_concurrency();
  const Index nthreads =
      std::max<Index>(1, std::min<Index>(hw ? hw : 1, npts));
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(nthreads));
  for (Index w = 0; w < nthreads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (Index i = w; i < npts; i += nthreads)
          out.data[static_cast<size_t>(i)] =
              s_params_at(model, sweep.points_hz(i), z0);
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : workers) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

TransientResult transient(const StateSpaceModel& model,
                          const Eigen::MatrixXd& input, double dt,
                          double horizon) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const Index steps = static_cast<Index>(std::llround(horizon / dt));
  if (input.rows() != model.inputs())
    throw DimensionError("input waveform has " + std::to_string(input.rows()) +
                         " rows, expected " + std::to_string(model.inputs()));
  if (input.cols() < steps + 1)
    throw DimensionError("input waveform does not cover the horizon (" +
                         std::to_string(input.cols()) + " samples, need " +
                         std::to_string(steps + 1) + ")");

  Eigen::SparseMatrix<double> lhs = model.C / dt - model.G;
  lhs.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(lhs);
  if (lu.info() != Eigen::Success)
    throw NumericalError("backward-Euler matrix (C/dt - G) is singular");

  TransientResult result;
  result.dt = dt;
  result.times = VectorXd::LinSpaced(steps + 1, 0.0, dt * static_cast<double>(steps));
  result.outputs = MatrixXd::Zero(model.outputs(), steps + 1);

  VectorXd x = VectorXd::Zero(model.order());
  for (Index k = 1; k <= steps; ++k) {
    const VectorXd rhs = model.C * x / dt + model.B * input.col(k);
    x = lu.solve(rhs);
    result.outputs.col(k) = model.L * x;
  }
  return result;
}

namespace {

struct ErrorAccumulator {
  double sum = 0.0, max = 0.0;
  long count = 0;
  static constexpr double kFloor = 1e-12;

  void add(double ref_mag, double err_mag) {
    const double rel = err_mag / std::max(ref_mag, kFloor);
    sum += rel;
    max = std::max(max, rel);
    ++count;
  }
  ErrorStats stats() const {
    ErrorStats s;
    s.mre_pct = count ? 100.0 * sum / static_cast<double>(count) : 0.0;
    s.max_re_pct = 100.0 * max;
    return s;
  }
};

}  // namespace

ErrorStats compare(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& test) {
  if (reference.rows() != test.rows() || reference.cols() != test.cols())
    throw DimensionError("compared matrices have different shapes");
  ErrorAccumulator acc;
  for (Index j = 0; j < reference.cols(); ++j)
    for (Index i = 0; i < reference.rows(); ++i)
      acc.add(std::abs(reference(i, j)), std::abs(test(i, j) - reference(i, j)));
  return acc.stats();
}

ErrorStats compare(const SParameterSet& reference, const SParameterSet& test) {
  if (reference.freqs_hz.size() != test.freqs_hz.size() ||
      (reference.freqs_hz.array() != test.freqs_hz.array()).any())
    throw DimensionError("S-parameter sets are on different frequency grids");
  if (reference.ports() != test.ports())
    throw DimensionError("S-parameter sets have different port counts");
  ErrorAccumulator acc;
  for (size_t f = 0; f < reference.data.size(); ++f) {
    const MatrixXcd& r = reference.data[f];
    const MatrixXcd& t = test.data[f];
    for (Index j = 0; j < r.cols(); ++j)
      for (Index i = 0; i < r.rows(); ++i)
        acc.add(std::abs(r(i, j)), std::abs(t(i, j) - r(i, j)));
  }
  return acc.stats();
}

ErrorStats compare(const TransientResult& reference, const TransientResult& test) {
  if (reference.times.size() != test.times.size() ||
      reference.dt != test.dt)
    throw DimensionError("transient results are on different time grids");
  if (reference.outputs.rows() != test.outputs.rows())
    throw DimensionError("transient results have different output counts");
  ErrorAccumulator acc;
  for (Index j = 0; j < reference.outputs.cols(); ++j)
    for (Index i = 0; i < reference.outputs.rows(); ++i)
      acc.add(std::abs(reference.outputs(i, j)),
              std::abs(test.outputs(i, j) - reference.outputs(i, j)));
  return acc.stats();
}

double max_passivity_violation(const SParameterSet& sparams) {
  double worst = 0.0;
  for (const MatrixXcd& S : sparams.data) {
    Eigen::JacobiSVD<MatrixXcd> svd(S);
    worst = std::max(worst, svd.singularValues()(0));
  }
  return worst;
}

double max_reciprocity_asymmetry(const SParameterSet& sparams) {
  double worst = 0.0;
  for (const MatrixXcd& S : sparams.data)
    worst = std::max(worst,
                     (S - S.transpose().eval()).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace morkit
