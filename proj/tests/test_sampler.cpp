#include <cmath>

#include <doctest.h>
#include <Eigen/Dense>

#include "fracfield/sampler.hpp"
#include "fracfield/weak_error.hpp"
#include "oracles.hpp"

using namespace fracfield;

TEST_CASE("mass Cholesky factor") {
  SparseSymMatrix one(1, 1);
  one.insert(0, 0) = 0.36;
  CHECK(cholesky_mass(one).lower.coeff(0, 0) == doctest::Approx(0.6).epsilon(1e-15));

  const SparseSymMatrix m = assemble_mass(build_mesh(1, 3));
  const SparseSymMatrix g = cholesky_mass(m).lower;
  const Eigen::MatrixXd gd = Eigen::MatrixXd(g);
  CHECK(gd.isLowerTriangular());
  const Eigen::MatrixXd back = gd * gd.transpose();
  CHECK(back(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(back(0, 1) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
  CHECK((back - Eigen::MatrixXd(m)).cwiseAbs().maxCoeff() <= 1e-14);

  SparseSymMatrix eye(4, 4);
  eye.setIdentity();
  CHECK((Eigen::MatrixXd(cholesky_mass(eye).lower) - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);

  const SparseSymMatrix m2 = assemble_mass(build_mesh(2, 9));
  const Eigen::MatrixXd g2 = Eigen::MatrixXd(cholesky_mass(m2).lower);
  CHECK((g2 * g2.transpose() - Eigen::MatrixXd(m2)).cwiseAbs().maxCoeff() <=
        1e-12 * Eigen::MatrixXd(m2).cwiseAbs().maxCoeff());

  SparseSymMatrix bad(2, 2);
  bad.insert(0, 0) = 1.0;
  bad.insert(1, 1) = -1.0;
  CHECK_THROWS_AS(cholesky_mass(bad), std::runtime_error);
}

TEST_CASE("normal stream is reproducible and positioned") {
  NormalStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 101; ++i) {
    const double x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
  CHECK(a.position() == 101);
  CHECK(a.seed() == 42);
  CHECK(NormalStream::name == "mt19937_64/box-muller");
}

TEST_CASE("normal stream moments and seed isolation") {
  NormalStream a(1), b(2);
  oracle::Accumulator ma, mab;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a(), y = b();
    ma.add(x);
    mab.add(x * y);
  }
  CHECK(std::abs(ma.get().mean) <= 5.0 / std::sqrt(n));
  CHECK(std::abs(ma.get().variance - 1.0) <= 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(mab.get().mean) <= 5.0 / std::sqrt(n));
}

TEST_CASE("noise loads: reproducible, zero mean, covariance M") {
  const SparseSymMatrix m = assemble_mass(build_mesh(1, 15));
  const NoiseFactor g = cholesky_mass(m);
  {
    NormalStream r1(9), r2(9);
    CHECK((sample_noise_load(g, r1).array() == sample_noise_load(g, r2).array()).all());
  }
  NormalStream rng(2024);
  const int draws = 200000;
  Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(15, 15);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(15);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(15, 15);  // for standard errors of the products
  for (int t = 0; t < draws; ++t) {
    const Eigen::VectorXd b = sample_noise_load(g, rng);
    sum += b;
    const Eigen::MatrixXd outer = b * b.transpose();
    sum_outer += outer;
    sum_sq += outer.cwiseProduct(outer);
  }
  const Eigen::MatrixXd md = Eigen::MatrixXd(m);
  const Eigen::MatrixXd mean_outer = sum_outer / draws;
  const Eigen::MatrixXd se = ((sum_sq / draws - mean_outer.cwiseProduct(mean_outer)) / draws).cwiseSqrt();
  for (Eigen::Index i = 0; i < 15; ++i) {
    CHECK(std::abs(sum(i) / draws) <= 5.0 * std::sqrt(md(i, i) / draws));
    for (Eigen::Index j = 0; j < 15; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(mean_outer(i, j) - md(i, j)) <= 5.0 * se(i, j) + 1e-15);
    }
  }
}

TEST_CASE("field sampling: zero noise, determinism, linearity") {
  const UniformMesh mesh(1, 31);
  const SparseSymMatrix m = assemble_mass(mesh);
  const SparseSymMatrix k = shifted_operator(m, assemble_stiffness(mesh), 0.5);
  const SincScheme scheme(0.75, calibrate_k(mesh.mesh_size(), 0.75));
  const SincOperator op(m, k, scheme);
  const NoiseFactor g = cholesky_mass(m);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(31);

  NoiseFactor silent;
  silent.lower = SparseSymMatrix(31, 31);
  NormalStream r0(1);
  CHECK(sample_field(zero, silent, op, mesh, r0).coefficients.norm() == 0.0);

  NormalStream r1(77), r2(77);
  const FieldRealization u1 = sample_field(zero, g, op, mesh, r1);
  const FieldRealization u2 = sample_field(zero, g, op, mesh, r2);
  CHECK((u1.coefficients.array() == u2.coefficients.array()).all());
  CHECK(u1.seed == 77);
  CHECK(u1.stream_position == 0);
  NormalStream r3(77);
  sample_field(zero, g, op, mesh, r3);
  CHECK(sample_field(zero, g, op, mesh, r3).stream_position == 31);

  const Eigen::VectorXd load = load_vector(mesh, [](const Point& x) { return 1.0 + x(0); });
  NormalStream ra(5), rb(5);
  const FieldRealization with_g = sample_field(load, g, op, mesh, ra);
  const FieldRealization with_2g = sample_field(2.0 * load, g, op, mesh, rb);
  const Eigen::VectorXd response = op.apply(load);
  CHECK((with_2g.coefficients - (with_g.coefficients + response)).norm() <= 1e-12 * with_2g.coefficients.norm());

  CHECK_THROWS_AS(sample_field(Eigen::VectorXd::Zero(30), g, op, mesh, r1), std::invalid_argument);
}

TEST_CASE("field evaluation") {
  const UniformMesh mesh(1, 7);
  FieldRealization u{Eigen::VectorXd::LinSpaced(7, 1.0, 7.0), mesh, 0, 0};
  for (Eigen::Index i = 0; i < 7; ++i) CHECK(field_eval(u, mesh.node(i)) == doctest::Approx(i + 1.0));
  CHECK(field_eval(u, Eigen::VectorXd::Constant(1, 0.0)) == 0.0);
  CHECK(field_eval(u, Eigen::VectorXd::Constant(1, 1.0)) == 0.0);
  CHECK(field_eval(u, Eigen::VectorXd::Constant(1, 0.5 * (mesh.node(2)(0) + mesh.node(3)(0)))) ==
        doctest::Approx(3.5));
  CHECK_THROWS(field_eval(u, Eigen::VectorXd::Constant(1, 1.5)));
}

TEST_CASE("load vector quadrature is exact for affine functions") {
  for (int dim : {1, 2}) {
    const UniformMesh mesh(dim, 6);
    const double area = dim == 1 ? mesh.grid_spacing() : mesh.grid_spacing() * mesh.grid_spacing();
    const Eigen::VectorXd ones = load_vector(mesh, [](const Point&) { return 1.0; });
    CHECK((ones.array() - area).abs().maxCoeff() <= 1e-15);
    // each hat is symmetric about its node, so (x_i, phi_j) = x_j * int phi_j
    const Eigen::VectorXd lin = load_vector(mesh, [](const Point& x) { return 2.0 - 3.0 * x(x.size() - 1); });
    for (Eigen::Index j = 0; j < mesh.dof_count(); ++j) {
      const Point p = mesh.node(j);
      CHECK(lin(j) == doctest::Approx((2.0 - 3.0 * p(dim - 1)) * area).epsilon(1e-13));
    }
  }
}

TEST_CASE("Monte Carlo variance matches the discrete variance (d=1, n=63, beta=0.75)") {
  const UniformMesh mesh(1, 63);
  const SparseSymMatrix m = assemble_mass(mesh);
  const SparseSymMatrix k = shifted_operator(m, assemble_stiffness(mesh), 0.5);
  const SincScheme scheme(0.75, calibrate_k(mesh.mesh_size(), 0.75));
  const Eigen::MatrixXd q = assemble_Q(m, k, scheme);
  const DenseOperator op(q);
  const NoiseFactor g = cholesky_mass(m);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(63);
  const EvalGrid grid(1, 3);  // 0, 0.5, 1
  const Eigen::ArrayXXd exact = discrete_variance_grid(q, m, mesh, grid);

  NormalStream rng(31337);
  oracle::Accumulator acc;
  const int draws = 100000;
  Point mid(1);
  mid(0) = 0.5;
  for (int t = 0; t < draws; ++t) acc.add(field_eval(sample_field(zero, g, op, mesh, rng), mid));
  const double var = acc.get().variance;
  const double se = var * std::sqrt(2.0 / (draws - 1));
  CHECK(std::abs(var - exact(1, 0)) <= 5.0 * se);
}
