#include "morkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "morkit/errors.hpp"

namespace morkit {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    // allow "inf" for epsilon-style keys
    if (value == "inf" || value == "+inf")
      return std::numeric_limits<double>::infinity();
    throw ConfigError("key '" + key + "' has invalid numeric value '" + value +
                      "'");
  }
  return v;
}

long to_long(const std::string& key, const std::string& value) {
  long v = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "' has invalid integer value '" + value +
                      "'");
  return v;
}

const std::set<std::string> kKnownKeys = {
    "netlist",        "matrix_g",     "matrix_c",       "matrix_b",
    "matrix_l",       "mode",         "epsilon",        "rom_order",
    "dense_cutoff",   "eks_tol",      "eks_maxiter",    "sweep_start_hz",
    "sweep_stop_hz",  "sweep_points", "sweep_scale",    "z0",
    "analyses",       "transient_dt", "transient_horizon", "outdir"};

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        " is not a key=value pair: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw ConfigError("unknown key '" + key + "' (line " +
                        std::to_string(line_no) + ")");
    if (kv.count(key))
      throw ConfigError("duplicate key '" + key + "' (line " +
                        std::to_string(line_no) + ")");
    if (value.empty())
      throw ConfigError("key '" + key + "' has an empty value (line " +
                        std::to_string(line_no) + ")");
    kv.emplace(key, value);
  }

  RunConfig cfg;
  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  // input form
  if (const auto* v = take("netlist")) {
    cfg.netlist = *v;
    cfg.has_netlist_input = true;
  }
  const bool g = take("matrix_g"), c = take("matrix_c"), b = take("matrix_b"),
             l = take("matrix_l");
  if (g || c || b || l) {
    if (!(g && c && b && l))
      throw ConfigError(
          "matrix input needs all four of matrix_g, matrix_c, matrix_b, "
          "matrix_l");
    cfg.matrices = {*take("matrix_g"), *take("matrix_c"), *take("matrix_b"),
                    *take("matrix_l")};
    cfg.has_matrix_input = true;
  }
  if (cfg.has_netlist_input && cfg.has_matrix_input)
    throw ConfigError("give either netlist= or matrix_* inputs, not both");
  if (!cfg.has_netlist_input && !cfg.has_matrix_input)
    throw ConfigError("missing required input: netlist= or matrix_* keys");

  // order rule
  const auto* eps = take("epsilon");
  const auto* rom_order = take("rom_order");
  if (eps && rom_order)
    throw ConfigError("conflicting order rule: give epsilon= or rom_order=, "
                      "not both");
  if (!eps && !rom_order)
    throw ConfigError("missing required key: epsilon= or rom_order=");
  if (eps) {
    cfg.rule = OrderRule::error_threshold(to_double("epsilon", *eps));
  } else {
    const long r = to_long("rom_order", *rom_order);
    if (r < 1) throw ConfigError("rom_order must be at least 1");
    cfg.rule = OrderRule::fixed_order(r);
  }

  if (const auto* v = take("mode")) {
    if (*v == "dense")
      cfg.mode = ReductionMode::Dense;
    else if (*v == "lowrank")
      cfg.mode = ReductionMode::LowRank;
    else if (*v == "auto")
      cfg.mode = ReductionMode::Auto;
    else
      throw ConfigError("mode must be dense, lowrank, or auto; got '" + *v +
                        "'");
  }
  if (const auto* v = take("dense_cutoff")) {
    cfg.dense_cutoff = to_long("dense_cutoff", *v);
    if (cfg.dense_cutoff < 1) throw ConfigError("dense_cutoff must be >= 1");
  }
  if (const auto* v = take("eks_tol")) {
    cfg.eks.tol = to_double("eks_tol", *v);
    if (!(cfg.eks.tol > 0.0)) throw ConfigError("eks_tol must be positive");
  }
  if (const auto* v = take("eks_maxiter")) {
    cfg.eks.maxiter = static_cast<int>(to_long("eks_maxiter", *v));
    if (cfg.eks.maxiter < 1) throw ConfigError("eks_maxiter must be >= 1");
  }

  if (const auto* v = take("sweep_start_hz"))
    cfg.sweep_start_hz = to_double("sweep_start_hz", *v);
  if (const auto* v = take("sweep_stop_hz"))
    cfg.sweep_stop_hz = to_double("sweep_stop_hz", *v);
  if (const auto* v = take("sweep_points")) {
    cfg.sweep_points = to_long("sweep_points", *v);
    if (cfg.sweep_points < 1) throw ConfigError("sweep_points must be >= 1");
  }
  if (const auto* v = take("sweep_scale")) {
    if (*v == "log")
      cfg.sweep_scale = SweepScale::Log;
    else if (*v == "linear")
      cfg.sweep_scale = SweepScale::Linear;
    else
      throw ConfigError("sweep_scale must be log or linear; got '" + *v + "'");
  }
  if (!(cfg.sweep_start_hz > 0.0) || !(cfg.sweep_stop_hz > 0.0))
    throw ConfigError("sweep frequencies must be positive");
  if (cfg.sweep_points > 1 && !(cfg.sweep_start_hz < cfg.sweep_stop_hz))
    throw ConfigError("sweep_start_hz must be below sweep_stop_hz");

  if (const auto* v = take("z0")) {
    cfg.z0 = to_double("z0", *v);
    if (!(cfg.z0 > 0.0)) throw ConfigError("z0 must be positive");
  }

  if (const auto* v = take("analyses")) {
    cfg.analyses.clear();
    std::string item;
    std::istringstream as(*v);
    while (std::getline(as, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      if (item != "dc" && item != "sp" && item != "transient")
        throw ConfigError("unknown analysis '" + item +
                          "' (expected dc, sp, transient)");
      cfg.analyses.insert(item);
    }
    if (cfg.analyses.empty())
      throw ConfigError("at least one analysis must be selected");
  }

  if (const auto* v = take("transient_dt"))
    cfg.transient_dt = to_double("transient_dt", *v);
  if (const auto* v = take("transient_horizon"))
    cfg.transient_horizon = to_double("transient_horizon", *v);
  if (cfg.analyses.count("transient")) {
    if (!(cfg.transient_dt > 0.0) || !(cfg.transient_horizon > 0.0))
      throw ConfigError(
          "transient analysis needs transient_dt= and transient_horizon=");
  }

  if (const auto* v = take("outdir")) cfg.outdir = *v;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

ReductionConfig RunConfig::reduction_config() const {
  ReductionConfig rc;
  rc.mode = mode;
  rc.rule = rule;
  rc.dense_cutoff = dense_cutoff;
  rc.eks = eks;
  return rc;
}

FrequencySweep RunConfig::sweep() const {
  return sweep_scale == SweepScale::Log
             ? FrequencySweep::log_spaced(sweep_start_hz, sweep_stop_hz,
                                          sweep_points)
             : FrequencySweep::linear_spaced(sweep_start_hz, sweep_stop_hz,
                                             sweep_points);
}

bool RunConfig::operator==(const RunConfig& other) const {
  return netlist == other.netlist && matrices.g == other.matrices.g &&
         matrices.c == other.matrices.c && matrices.b == other.matrices.b &&
         matrices.l == other.matrices.l &&
         has_netlist_input == other.has_netlist_input &&
         has_matrix_input == other.has_matrix_input && mode == other.mode &&
         rule.kind == other.rule.kind && rule.r == other.rule.r &&
         rule.epsilon == other.rule.epsilon &&
         dense_cutoff == other.dense_cutoff &&
         eks.maxiter == other.eks.maxiter && eks.tol == other.eks.tol &&
         eks.deflation_tol == other.eks.deflation_tol &&
         sweep_start_hz == other.sweep_start_hz &&
         sweep_stop_hz == other.sweep_stop_hz &&
         sweep_points == other.sweep_points &&
         sweep_scale == other.sweep_scale && z0 == other.z0 &&
         analyses == other.analyses && transient_dt == other.transient_dt &&
         transient_horizon == other.transient_horizon && outdir == other.outdir;
}

std::string dump_config(const RunConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  auto put_num = [&](const char* key, double v) {
    if (std::isinf(v))
      out << key << "=inf\n";
    else {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << key << '=' << buf << '\n';
    }
  };

  out << "# effective configuration\n";
  if (cfg.has_netlist_input) out << "netlist=" << cfg.netlist << '\n';
  if (cfg.has_matrix_input) {
    out << "matrix_g=" << cfg.matrices.g << '\n';
    out << "matrix_c=" << cfg.matrices.c << '\n';
    out << "matrix_b=" << cfg.matrices.b << '\n';
    out << "matrix_l=" << cfg.matrices.l << '\n';
  }
  out << "mode="
      << (cfg.mode == ReductionMode::Dense
              ? "dense"
              : cfg.mode == ReductionMode::LowRank ? "lowrank" : "auto")
      << '\n';
  if (cfg.rule.kind == OrderRule::Kind::ErrorThreshold)
    put_num("epsilon", cfg.rule.epsilon);
  else
    out << "rom_order=" << cfg.rule.r << '\n';
  out << "dense_cutoff=" << cfg.dense_cutoff << '\n';
  put_num("eks_tol", cfg.eks.tol);
  out << "eks_maxiter=" << cfg.eks.maxiter << '\n';
  put_num("sweep_start_hz", cfg.sweep_start_hz);
  put_num("sweep_stop_hz", cfg.sweep_stop_hz);
  out << "sweep_points=" << cfg.sweep_points << '\n';
  out << "sweep_scale="
      << (cfg.sweep_scale == SweepScale::Log ? "log" : "linear") << '\n';
  put_num("z0", cfg.z0);
  std::string analyses;
  for (const std::string& a : cfg.analyses)
    analyses += (analyses.empty() ? "" : ",") + a;
  out << "analyses=" << analyses << '\n';
  if (cfg.analyses.count("transient")) {
    put_num("transient_dt", cfg.transient_dt);
    put_num("transient_horizon", cfg.transient_horizon);
  }
  out << "outdir=" << cfg.outdir << '\n';
  return out.str();
}

}  // namespace morkit
