#ifndef MORKIT_MATRIX_MARKET_HPP
#define MORKIT_MATRIX_MARKET_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>

namespace morkit {

/// Reads a Matrix Market coordinate file (real or integer entries, general or
/// symmetric). Symmetric storage is expanded to both triangles. Complex and
/// pattern fields are rejected.
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);

/// Dense convenience wrapper around read_matrix_market.
Eigen::MatrixXd read_matrix_market_dense(const std::string& path);

/// Writes a matrix in coordinate/real/general form with 17 significant
/// digits, enough for an exact double round-trip through text.
void write_matrix_market(const std::string& path,
                         const Eigen::SparseMatrix<double>& m);
void write_matrix_market(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace morkit

#endif  // MORKIT_MATRIX_MARKET_HPP
