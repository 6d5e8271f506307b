#include <doctest.h>

#include <random>

#include "morkit/errors.hpp"
#include "morkit/mna.hpp"
#include "morkit/state_space.hpp"
#include "support.hpp"

using namespace morkit;
using Eigen::Index;
using Eigen::MatrixXd;

namespace {

MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return MatrixXd(m); }

// Random RLCk netlist over a handful of nodes; every element is also returned
// as its own single-element netlist for the superposition oracle.
struct RandomNet {
  RlckNetlist full;
  std::vector<RlckNetlist> singles;
};

RandomNet random_rlck(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> node(0, 4);  // node 0 = ground
  std::uniform_real_distribution<double> val(0.5, 3.0);
  RandomNet out;

  auto nodes = [&] {
    int a = node(rng), b = node(rng);
    while (b == a) b = node(rng);
    return std::pair<std::string, std::string>(std::to_string(a),
                                               std::to_string(b));
  };

  // keep the node universe identical in every single-element netlist so the
  // stamped matrices share one indexing
  auto seed_nodes = [&](RlckNetlist& net) {
    for (int i = 1; i <= 4; ++i) net.intern_node(std::to_string(i));
  };
  seed_nodes(out.full);

  int id = 0;
  auto add = [&](char kind, const std::string& a, const std::string& b,
                 double v) {
    const std::string name = std::string(1, kind) + std::to_string(++id);
    RlckNetlist single;
    seed_nodes(single);
    if (kind == 'R') {
      out.full.add_resistor(name, a, b, v);
      single.add_resistor(name, a, b, v);
    } else if (kind == 'C') {
      out.full.add_capacitor(name, a, b, v * 1e-15);
      single.add_capacitor(name, a, b, v * 1e-15);
    } else {
      out.full.add_inductor(name, a, b, v * 1e-12);
      single.add_inductor(name, a, b, v * 1e-12);
    }
    out.singles.push_back(std::move(single));
  };

  const char kinds[] = {'R', 'C', 'L', 'R', 'C', 'L', 'R', 'C', 'L', 'R'};
  for (char kind : kinds) {
    auto [a, b] = nodes();
    add(kind, a, b, val(rng));
  }
  return out;
}

}  // namespace

TEST_SUITE("mna") {

TEST_CASE("single grounded resistor stamp") {
  const MnaSystem sys = assemble_mna(parse_netlist("R1 1 0 50\nP1 1"));
  CHECK(sys.n == 1);
  CHECK(sys.m == 0);
  CHECK(sys.p == 1);
  CHECK(dense(sys.Gn)(0, 0) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(dense(sys.Cn)(0, 0) == 0.0);
  CHECK(sys.B1(0, 0) == 1.0);
  CHECK(sys.L1(0, 0) == 1.0);
}

TEST_CASE("single grounded inductor stamp") {
  const MnaSystem sys =
      assemble_mna(parse_netlist("L1 1 0 1e-9\nR1 1 0 1\nP1 1"));
  CHECK(sys.m == 1);
  CHECK(dense(sys.E)(0, 0) == 1.0);
  CHECK(dense(sys.M)(0, 0) == 1e-9);
}

TEST_CASE("floating element stamps both diagonals and off-diagonals") {
  const MnaSystem sys = assemble_mna(parse_netlist("R1 1 2 4\nP1 1\nP2 2"));
  const MatrixXd g = dense(sys.Gn);
  CHECK(g(0, 0) == doctest::Approx(0.25));
  CHECK(g(1, 1) == doctest::Approx(0.25));
  CHECK(g(0, 1) == doctest::Approx(-0.25));
  CHECK(g(1, 0) == doctest::Approx(-0.25));
}

TEST_CASE("assembly is superposition-linear over elements") {
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    RandomNet nets = random_rlck(seed);
    const MnaSystem full = assemble_mna(nets.full);

    MatrixXd gn = MatrixXd::Zero(full.n, full.n);
    MatrixXd cn = MatrixXd::Zero(full.n, full.n);
    Index branch = 0;
    for (const RlckNetlist& single : nets.singles) {
      const MnaSystem part = assemble_mna(single);
      gn += dense(part.Gn);
      cn += dense(part.Cn);
      if (part.m == 1) {  // inductor branches line up in element order
        CHECK((dense(full.E).col(branch) - dense(part.E).col(0)).norm() == 0.0);
        CHECK(dense(full.M)(branch, branch) == dense(part.M)(0, 0));
        ++branch;
      }
    }
    CHECK(branch == full.m);
    CHECK((gn - dense(full.Gn)).norm() == 0.0);  // stamps add exactly
    CHECK((cn - dense(full.Cn)).norm() == 0.0);
  }
}

TEST_CASE("stamped matrices are exactly symmetric") {
  const RlckNetlist net = parse_netlist(testsupport::rlck_line_netlist(15));
  const MnaSystem sys = assemble_mna(net);
  CHECK((dense(sys.Gn) - dense(sys.Gn).transpose()).norm() == 0.0);
  CHECK((dense(sys.Cn) - dense(sys.Cn).transpose()).norm() == 0.0);
  CHECK((dense(sys.M) - dense(sys.M).transpose()).norm() == 0.0);
  sys.validate();  // E structure, diagonal signs
}

TEST_CASE("mutual inductance lands symmetrically in M") {
  const MnaSystem sys = assemble_mna(parse_netlist(
      "L1 1 0 1e-9\nL2 2 0 4e-9\nR1 1 2 1\nK1 L1 L2 5e-10\nP1 1"));
  const MatrixXd m = dense(sys.M);
  CHECK(m(0, 1) == 5e-10);
  CHECK(m(1, 0) == 5e-10);
  CHECK(m(0, 0) == 1e-9);
  CHECK(m(1, 1) == 4e-9);
}

TEST_CASE("state-space blocks follow the MNA layout") {
  // RL model: n = 1, m = 1, Gn = [0.02], E = [1], M = [1e-9]
  const MnaSystem sys =
      assemble_mna(parse_netlist("R1 1 0 50\nL1 1 0 1e-9\nP1 1"));
  const StateSpaceModel model = to_state_space(sys);
  CHECK(model.order() == 2);
  const MatrixXd g = dense(model.G);
  CHECK(g(0, 0) == doctest::Approx(-0.02));
  CHECK(g(0, 1) == -1.0);
  CHECK(g(1, 0) == 1.0);
  CHECK(g(1, 1) == 0.0);
  const MatrixXd c = dense(model.C);
  CHECK(c(0, 0) == kDefaultCapRegularization);  // no capacitor on the node
  CHECK(c(1, 1) == 1e-9);
  CHECK(model.regularized_count == 1);
  CHECK(model.B(0, 0) == 1.0);
  CHECK(model.B(1, 0) == 0.0);
  CHECK(model.L(0, 0) == 1.0);
  CHECK(model.L(0, 1) == 0.0);
}

TEST_CASE("resistor-only model degenerates to G = -Gn") {
  const MnaSystem sys = assemble_mna(parse_netlist("R1 1 0 50\nP1 1"));
  const StateSpaceModel model = to_state_space(sys);
  CHECK(model.order() == 1);
  CHECK(dense(model.G)(0, 0) == doctest::Approx(-0.02));
  CHECK(dense(model.C)(0, 0) == kDefaultCapRegularization);
}

TEST_CASE("block extraction inverts the conversion") {
  const RlckNetlist net = parse_netlist(testsupport::rlck_line_netlist(10));
  const MnaSystem sys = assemble_mna(net);
  const StateSpaceModel model = to_state_space(sys);
  CHECK(model.order() == sys.n + sys.m);

  const MatrixXd g = dense(model.G);
  const MatrixXd c = dense(model.C);
  CHECK((g.topLeftCorner(sys.n, sys.n) + dense(sys.Gn)).norm() == 0.0);
  CHECK((g.topRightCorner(sys.n, sys.m) + dense(sys.E)).norm() == 0.0);
  CHECK((g.bottomLeftCorner(sys.m, sys.n) - dense(sys.E).transpose()).norm() ==
        0.0);
  CHECK(g.bottomRightCorner(sys.m, sys.m).norm() == 0.0);
  CHECK((c.bottomRightCorner(sys.m, sys.m) - dense(sys.M)).norm() == 0.0);
  // Cn block recovered exactly where it had nonzero diagonal
  MatrixXd cn = c.topLeftCorner(sys.n, sys.n);
  for (Index i = 0; i < sys.n; ++i)
    if (dense(sys.Cn)(i, i) == 0.0) cn(i, i) = 0.0;  // undo regularization
  CHECK((cn - dense(sys.Cn)).norm() == 0.0);
  CHECK((model.B.topRows(sys.n) - sys.B1).norm() == 0.0);
  CHECK((model.L.leftCols(sys.n) - sys.L1).norm() == 0.0);
}

TEST_CASE("order arithmetic matches n + m at scale") {
  // n = 3084 voltage states and m = 2347 currents give order 5431
  const Index n = 3084, m = 2347;
  CHECK(n + m == 5431);
  // same arithmetic through a real assembly at smaller scale
  const RlckNetlist net = parse_netlist(testsupport::rlck_line_netlist(25));
  const MnaSystem sys = assemble_mna(net);
  CHECK(to_state_space(sys).order() == sys.n + sys.m);
}

}  // TEST_SUITE
