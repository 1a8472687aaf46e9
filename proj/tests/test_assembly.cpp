#include <sstream>

#include <doctest.h>
#include <Eigen/SparseCholesky>

#include "fracfield/assembly.hpp"
#include "oracles.hpp"

using namespace fracfield;

TEST_CASE("stencils match per-element assembly") {
  for (int dim : {1, 2}) {
    for (Eigen::Index n : {1, 2, 3, 7}) {
      CAPTURE(dim);
      CAPTURE(n);
      const UniformMesh mesh = build_mesh(dim, n);
      const oracle::DenseFem ref = oracle::element_assembly(dim, n);
      const Eigen::MatrixXd m = Eigen::MatrixXd(assemble_mass(mesh));
      const Eigen::MatrixXd s = Eigen::MatrixXd(assemble_stiffness(mesh));
      CHECK((m - ref.mass).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((s - ref.stiffness).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
}

TEST_CASE("1D values for n = 3 and n = 1") {
  const Eigen::MatrixXd m = Eigen::MatrixXd(assemble_mass(build_mesh(1, 3)));
  const Eigen::MatrixXd s = Eigen::MatrixXd(assemble_stiffness(build_mesh(1, 3)));
  CHECK(m(1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(m(0, 1) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(m(0, 2) == 0.0);
  CHECK(s(1, 1) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(s(1, 2) == doctest::Approx(-4.0).epsilon(1e-15));

  const SparseSymMatrix one = assemble_mass(build_mesh(1, 1));
  CHECK(one.rows() == 1);
  CHECK(one.coeff(0, 0) == doctest::Approx(2.0 * 0.5 / 3.0).epsilon(1e-15));
}

TEST_CASE("2D row sums and diagonal") {
  const UniformMesh mesh = build_mesh(2, 5);
  const double hh = mesh.grid_spacing() * mesh.grid_spacing();
  const Eigen::MatrixXd m = Eigen::MatrixXd(assemble_mass(mesh));
  const Eigen::MatrixXd s = Eigen::MatrixXd(assemble_stiffness(mesh));
  for (Eigen::Index iy = 1; iy < 4; ++iy) {
    for (Eigen::Index ix = 1; ix < 4; ++ix) {
      const Eigen::Index r = ix + 5 * iy;
      CHECK(m.row(r).sum() == doctest::Approx(hh).epsilon(1e-14));
      CHECK(std::abs(s.row(r).sum()) <= 1e-14);
    }
  }
  const Eigen::MatrixXd s3 = Eigen::MatrixXd(assemble_stiffness(build_mesh(2, 3)));
  CHECK((s3.diagonal().array() == 4.0).all());
}

TEST_CASE("mass and stiffness are exactly symmetric and positive definite for n <= 64") {
  for (int dim : {1, 2}) {
    for (Eigen::Index n = 1; n <= 64; ++n) {
      const UniformMesh mesh = build_mesh(dim, n);
      for (const SparseSymMatrix& a : {assemble_mass(mesh), assemble_stiffness(mesh)}) {
        const SparseSymMatrix at = a.transpose();
        CHECK((a - at).norm() == 0.0);
        Eigen::SimplicialLLT<SparseSymMatrix> llt(a);
        CHECK(llt.info() == Eigen::Success);
      }
    }
  }
}

TEST_CASE("mass and stiffness share one sparsity pattern") {
  const UniformMesh mesh = build_mesh(2, 6);
  const SparseSymMatrix m = assemble_mass(mesh), s = assemble_stiffness(mesh);
  CHECK(m.nonZeros() == s.nonZeros());
  CHECK(shifted_operator(m, s, 0.5).nonZeros() == m.nonZeros());
}

TEST_CASE("shifted operator") {
  const UniformMesh mesh = build_mesh(1, 4);
  const SparseSymMatrix m = assemble_mass(mesh), s = assemble_stiffness(mesh);
  const Eigen::MatrixXd k = Eigen::MatrixXd(shifted_operator(m, s, 0.5));
  CHECK((k - (0.25 * Eigen::MatrixXd(m) + Eigen::MatrixXd(s))).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK_THROWS_AS(shifted_operator(m, assemble_mass(build_mesh(1, 5)), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(shifted_operator(m, s, -1.0), std::invalid_argument);
}

TEST_CASE("single precision assembly agrees with double") {
  const UniformMesh mesh = build_mesh(2, 4);
  const Eigen::MatrixXd d = Eigen::MatrixXd(assemble_mass(mesh));
  const Eigen::MatrixXf f = Eigen::MatrixXf(assemble_mass<float>(mesh));
  CHECK((d - f.cast<double>()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("coordinate text dump") {
  std::ostringstream os;
  write_coordinate_text(os, assemble_stiffness(build_mesh(1, 2)));
  CHECK(os.str() == "0 0 6\n1 0 -3\n0 1 -3\n1 1 6\n");
}
