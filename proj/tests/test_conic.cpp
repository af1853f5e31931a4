#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mafd/conic.hpp"
#include "mafd/errors.hpp"
#include "support.hpp"

using namespace mafd;
using namespace mafd::conic;
using testing::cd;

TEST_CASE("hermitian_embed") {
  const Eigen::MatrixXd eye = hermitian_embed(Eigen::MatrixXcd::Identity(3, 3));
  CHECK((eye - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);

  Eigen::MatrixXcd pauli(2, 2);
  pauli << 0.0, cd(0, 1), cd(0, -1), 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hermitian_embed(pauli));
  const Eigen::VectorXd ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(-1.0));
  CHECK(ev(1) == doctest::Approx(-1.0));
  CHECK(ev(2) == doctest::Approx(1.0));
  CHECK(ev(3) == doctest::Approx(1.0));

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd h = testing::random_psd(5, 3, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e(hermitian_embed(h));
    CHECK(e.eigenvalues().minCoeff() >= -1e-9);
  }

  Eigen::MatrixXcd bad(2, 2);
  bad << 1.0, cd(0, 1), cd(0, 1), 1.0;
  CHECK_THROWS_AS(hermitian_embed(bad), ContractViolation);
}

TEST_CASE("Hermitian variables embed consistently") {
  ConicProgram prog;
  const HermitianVar w = prog.add_hermitian("W", 3);
  CHECK(w.scalar_count() == 9);
  CHECK(prog.num_scalars() == 9);
  std::mt19937_64 rng(2);
  const Eigen::MatrixXcd value = testing::random_psd(3, 2, rng);
  std::vector<double> scalars(9);
  w.store(value, scalars);
  CHECK((w.value(scalars) - value).norm() < 1e-14);
  CHECK((w.embedded().evaluate(scalars) - hermitian_embed(value)).norm() < 1e-13);
  const Eigen::MatrixXcd h = testing::random_psd(3, 3, rng);
  CHECK(w.trace_with(h).evaluate(scalars) == doctest::Approx((value * h).trace().real()));
  CHECK(w.trace().evaluate(scalars) == doctest::Approx(value.trace().real()));
}

TEST_CASE("one-dimensional LP") {
  ConicProgram prog;
  const Var x = prog.add_scalar("x");
  prog.add_inequality(LinExpr(x) - 3.0);
  prog.minimize(x);
  const SolveReport r = solve(prog);
  REQUIRE(r.optimal());
  CHECK(r.objective_value == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(r.value(x) == doctest::Approx(3.0).epsilon(1e-7));
}

TEST_CASE("trace minimization above the identity") {
  ConicProgram prog;
  const SymmetricVar X = prog.add_symmetric("X", 2);
  MatExpr floor = X.expr();
  floor.add_constant(0, 0, -1.0);
  floor.add_constant(1, 1, -1.0);
  prog.add_psd(floor);
  prog.minimize(X.trace());
  const SolveReport r = solve(prog);
  REQUIRE(r.optimal());
  CHECK(r.objective_value == doctest::Approx(2.0).epsilon(1e-7));
  CHECK((X.value(r) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-6);
}

TEST_CASE("small SDP against a frozen external optimum") {
  // minimize Tr(C X) s.t. Tr(A_i X) = b_i, X PSD. Reference optimum from two
  // independent interior-point codes (they agree to 2e-9 relative).
  const double C[4][4] = {{2.0, -0.08, -0.38, -0.39}, {-0.08, 1.01, -0.28, 0.2}, {-0.38, -0.28, 2.49, 0.16}, {-0.39, 0.2, 0.16, 2.7}};
  const double A[3][4][4] = {
      {{-1.34, -1.15, -0.87, -0.67}, {-1.15, -0.24, -0.73, 0.19}, {-0.87, -0.73, -2.52, -1.03}, {-0.67, 0.19, -1.03, -0.48}},
      {{-0.98, -0.42, 0.59, 0.28}, {-0.42, 0.88, -0.26, -0.83}, {0.59, -0.26, -1.23, 0.47}, {0.28, -0.83, 0.47, 0.12}},
      {{-0.64, 1.04, 0.35, -0.5}, {1.04, 0.58, 0.24, 0.11}, {0.35, 0.24, 1.44, -0.27}, {-0.5, 0.11, -0.27, -1.19}}};
  const double reference = 2.66286702;

  ConicProgram prog;
  const SymmetricVar X = prog.add_symmetric("X", 4);
  auto inner = [&](const double (&m)[4][4]) {
    LinExpr e;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c <= r; ++c) e.add(X.at(r, c), r == c ? m[r][c] : 2.0 * m[r][c]);
    return e;
  };
  for (const auto& a : A) {
    double b = 0.0;
    for (int i = 0; i < 4; ++i) b += a[i][i];
    prog.add_equality(inner(a) - b);
  }
  prog.add_psd(X.expr());
  prog.minimize(inner(C));
  const SolveReport r = solve(prog);
  REQUIRE(r.optimal());
  CHECK(r.objective_value == doctest::Approx(reference).epsilon(1e-6));
  CHECK(prog.max_violation(r.values) < 1e-7);
}

TEST_CASE("infeasible and unbounded programs") {
  {
    ConicProgram prog;
    const Var x = prog.add_scalar("x");
    prog.add_inequality(LinExpr(x) - 2.0);
    prog.add_inequality(1.0 - LinExpr(x));
    prog.minimize(x);
    CHECK(solve(prog).status == SolveStatus::infeasible);
  }
  {
    ConicProgram prog;
    const SymmetricVar X = prog.add_symmetric("X", 2);
    prog.add_psd(X.expr());
    prog.add_equality(X.trace() + 1.0);
    prog.minimize(X.trace());
    CHECK(solve(prog).status == SolveStatus::infeasible);
  }
  {
    ConicProgram prog;
    const Var x = prog.add_scalar("x");
    prog.add_inequality(LinExpr(x) - 1.0);
    prog.minimize(-1.0 * LinExpr(x));
    CHECK(solve(prog).status == SolveStatus::unbounded);
  }
}

TEST_CASE("solver is deterministic") {
  ConicProgram prog;
  const SymmetricVar X = prog.add_symmetric("X", 3);
  const Var t = prog.add_scalar("t");
  MatExpr m = X.expr();
  m.add_constant(0, 1, 0.3);
  prog.add_psd(m);
  prog.add_inequality(LinExpr(t) - X.trace());
  prog.add_equality(LinExpr(X.at(2, 2)) - 1.5);
  prog.minimize(t);
  const SolveReport a = solve(prog);
  const SolveReport b = solve(prog);
  CHECK(a.status == b.status);
  CHECK(std::abs(a.objective_value - b.objective_value) <= 1e-12);
  CHECK(a.values == b.values);
}

TEST_CASE("expressions and SDPA dump") {
  ConicProgram prog;
  const Var x = prog.add_scalar("x");
  const Var y = prog.add_scalar("y");
  LinExpr e = 2.0 * LinExpr(x) + LinExpr(y) - 1.0;
  const std::vector<double> v{1.0, 3.0};
  CHECK(e.evaluate(v) == 4.0);
  prog.add_inequality(e);
  prog.add_equality(LinExpr(x) - LinExpr(y));
  MatExpr m(2);
  m.add_term(x, 0, 0, 1.0).add_term(y, 1, 1, 1.0).add_constant(0, 1, 0.5);
  prog.add_psd(m);
  prog.minimize(LinExpr(x) + LinExpr(y));
  CHECK(prog.max_violation(v) == doctest::Approx(2.0));
  std::ostringstream out;
  prog.write_sdpa(out);
  CHECK(out.str().find("2 = m\n2 = nBlocks\n-3 2\n") != std::string::npos);
  CHECK_THROWS(prog.add_inequality(LinExpr(Var{7})));
}
