#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "morkit/errors.hpp"
#include "morkit/matrix_market.hpp"
#include "morkit/state_space.hpp"
#include "support.hpp"

using namespace morkit;
using Eigen::MatrixXd;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("morkit_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_SUITE("matrix_market") {

TEST_CASE("coordinate round-trip is exact") {
  TempDir dir;
  std::mt19937 rng(3);
  const MatrixXd m = testsupport::random_matrix(rng, 7, 4) * 1e-9;
  write_matrix_market(dir.file("m.mtx"), m);
  const MatrixXd back = read_matrix_market_dense(dir.file("m.mtx"));
  CHECK((back - m).norm() == 0.0);  // 17 digits reproduce doubles exactly
}

TEST_CASE("symmetric storage expands to both triangles") {
  TempDir dir;
  write_text(dir.file("s.mtx"),
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "2 2 2\n"
             "1 1 4.0\n"
             "2 1 -1.5\n");
  const MatrixXd m = read_matrix_market_dense(dir.file("s.mtx"));
  CHECK(m(0, 1) == -1.5);
  CHECK(m(1, 0) == -1.5);
  CHECK(m(0, 0) == 4.0);
}

TEST_CASE("missing and malformed files raise IoError") {
  CHECK_THROWS_AS(read_matrix_market("/nonexistent/file.mtx"), IoError);
  TempDir dir;
  write_text(dir.file("bad.mtx"), "not a matrix\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(dir.file("bad.mtx")), IoError);
  write_text(dir.file("complex.mtx"),
             "%%MatrixMarket matrix coordinate complex general\n1 1 1\n"
             "1 1 1.0 0.0\n");
  CHECK_THROWS_AS(read_matrix_market(dir.file("complex.mtx")), Error);
}

TEST_CASE("load_matrices checks mutual consistency") {
  TempDir dir;
  // 2-state model with 1 port
  write_text(dir.file("G.mtx"),
             "%%MatrixMarket matrix coordinate real general\n2 2 3\n"
             "1 1 -1.0\n2 2 -2.0\n1 2 0.5\n");
  write_text(dir.file("C.mtx"),
             "%%MatrixMarket matrix coordinate real general\n2 2 2\n"
             "1 1 1.0\n2 2 1.0\n");
  write_text(dir.file("B.mtx"),
             "%%MatrixMarket matrix coordinate real general\n2 1 1\n"
             "1 1 1.0\n");
  write_text(dir.file("L.mtx"),
             "%%MatrixMarket matrix coordinate real general\n1 2 1\n"
             "1 1 1.0\n");
  const StateSpaceModel model = load_matrices(
      {dir.file("G.mtx"), dir.file("C.mtx"), dir.file("B.mtx"), dir.file("L.mtx")});
  CHECK(model.order() == 2);
  CHECK(model.inputs() == 1);
  CHECK(model.outputs() == 1);

  // B with the wrong row count
  write_text(dir.file("B3.mtx"),
             "%%MatrixMarket matrix coordinate real general\n3 1 1\n"
             "1 1 1.0\n");
  CHECK_THROWS_AS(
      load_matrices({dir.file("G.mtx"), dir.file("C.mtx"), dir.file("B3.mtx"),
                     dir.file("L.mtx")}),
      DimensionError);

  // asymmetric C
  write_text(dir.file("Casym.mtx"),
             "%%MatrixMarket matrix coordinate real general\n2 2 3\n"
             "1 1 1.0\n2 2 1.0\n1 2 0.25\n");
  CHECK_THROWS_AS(
      load_matrices({dir.file("G.mtx"), dir.file("Casym.mtx"),
                     dir.file("B.mtx"), dir.file("L.mtx")}),
      NumericalError);
}

TEST_CASE("model write-read round-trip") {
  TempDir dir;
  std::mt19937 rng(17);
  const MatrixXd a = testsupport::random_stable_dense(rng, 5);
  const MatrixXd b = testsupport::random_matrix(rng, 5, 2);
  const MatrixXd l = testsupport::random_matrix(rng, 2, 5);
  const StateSpaceModel model = testsupport::identity_c_model(a, b, l);

  write_matrix_market(dir.file("G.mtx"), model.G);
  write_matrix_market(dir.file("C.mtx"), model.C);
  write_matrix_market(dir.file("B.mtx"), model.B);
  write_matrix_market(dir.file("L.mtx"), model.L);
  const StateSpaceModel back = load_matrices(
      {dir.file("G.mtx"), dir.file("C.mtx"), dir.file("B.mtx"), dir.file("L.mtx")});

  CHECK((MatrixXd(back.G) - MatrixXd(model.G)).norm() == 0.0);
  CHECK((MatrixXd(back.C) - MatrixXd(model.C)).norm() == 0.0);
  CHECK((back.B - model.B).norm() == 0.0);
  CHECK((back.L - model.L).norm() == 0.0);
}

}  // TEST_SUITE
