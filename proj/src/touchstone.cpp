#include "morkit/touchstone.hpp"

#include <cstdio>
#include <fstream>

#include "morkit/errors.hpp"

namespace morkit {

std::string touchstone_filename(const std::string& stem, Eigen::Index ports) {
  return stem + ".s" + std::to_string(ports) + "p";
}

void write_touchstone(const std::string& path, const SParameterSet& sparams) {
  const Eigen::Index p = sparams.ports();
  if (p == 0) throw Error("cannot write Touchstone file without data");

  std::ofstream out(path);
  if (!out) throw IoError("cannot write Touchstone file: " + path);

  char buf[160];
  out << "! " << p << "-port S-parameters\n";
  std::snprintf(buf, sizeof(buf), "# HZ S RI R %g", sparams.z0);
  out << buf << '\n';

  for (Eigen::Index f = 0; f < sparams.freqs_hz.size(); ++f) {
    const Eigen::MatrixXcd& S = sparams.data[static_cast<size_t>(f)];
    std::snprintf(buf, sizeof(buf), "%.9e", sparams.freqs_hz(f));
    if (p == 1) {
      out << buf;
      std::snprintf(buf, sizeof(buf), " %.9e %.9e", S(0, 0).real(),
                    S(0, 0).imag());
      out << buf << '\n';
    } else if (p == 2) {
      // v1 two-port order: S11 S21 S12 S22
      out << buf;
      std::snprintf(buf, sizeof(buf), " %.9e %.9e %.9e %.9e %.9e %.9e %.9e %.9e",
                    S(0, 0).real(), S(0, 0).imag(), S(1, 0).real(),
                    S(1, 0).imag(), S(0, 1).real(), S(0, 1).imag(),
                    S(1, 1).real(), S(1, 1).imag());
      out << buf << '\n';
    } else {
      for (Eigen::Index i = 0; i < p; ++i) {
        if (i == 0)
          out << buf;
        else
          out << "     ";
        int on_line = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
          if (on_line == 4) {  // v1 limit of four pairs per line
            out << "\n     ";
            on_line = 0;
          }
          std::snprintf(buf, sizeof(buf), " %.9e %.9e", S(i, j).real(),
                        S(i, j).imag());
          out << buf;
          ++on_line;
        }
        out << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace morkit
