#include "morkit/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "morkit/errors.hpp"

namespace morkit {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Eigen::SparseMatrix<double> read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);

  std::string banner;
  if (!std::getline(in, banner))
    throw IoError("empty matrix file: " + path);

  std::istringstream hs(banner);
  std::string magic, object, format, field, symmetry;
  hs >> magic >> object >> format >> field >> symmetry;
  if (lowercase(magic) != "%%matrixmarket")
    throw IoError("not a Matrix Market file: " + path);
  if (lowercase(object) != "matrix" || lowercase(format) != "coordinate")
    throw IoError("unsupported Matrix Market layout in " + path +
                  " (expected 'matrix coordinate')");
  field = lowercase(field);
  if (field != "real" && field != "integer")
    throw Error("non-real entries in " + path + " (field '" + field + "')");
  symmetry = lowercase(symmetry);
  if (symmetry != "general" && symmetry != "symmetric")
    throw IoError("unsupported symmetry '" + symmetry + "' in " + path);
  const bool symmetric = symmetry == "symmetric";

  std::string line;
  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz))
      throw IoError("malformed size line in " + path + ": '" + line + "'");
    break;
  }
  if (rows < 0 || cols < 0 || nnz < 0)
    throw IoError("missing size line in " + path);

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<size_t>(symmetric ? 2 * nnz : nnz));
  long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    long i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v))
      throw IoError("malformed entry in " + path + ": '" + line + "'");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw IoError("entry index out of range in " + path + ": '" + line + "'");
    entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (symmetric && i != j)
      entries.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    ++seen;
  }
  if (seen != nnz)
    throw IoError("expected " + std::to_string(nnz) + " entries in " + path +
                  ", found " + std::to_string(seen));

  Eigen::SparseMatrix<double> m(static_cast<int>(rows), static_cast<int>(cols));
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

Eigen::MatrixXd read_matrix_market_dense(const std::string& path) {
  return Eigen::MatrixXd(read_matrix_market(path));
}

void write_matrix_market(const std::string& path,
                         const Eigen::SparseMatrix<double>& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";

  long nnz = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.value() != 0.0) ++nnz;
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';

  char buf[64];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.value() == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      out << (it.row() + 1) << ' ' << (it.col() + 1) << ' ' << buf << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

void write_matrix_market(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";

  long nnz = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++nnz;
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';

  char buf[64];
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (i + 1) << ' ' << (j + 1) << ' ' << buf << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace morkit
