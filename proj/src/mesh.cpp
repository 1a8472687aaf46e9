#include "fracfield/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracfield {

UniformMesh::UniformMesh(int dim, Eigen::Index interior_per_dim) : dim_(dim), n_(interior_per_dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("mesh dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (interior_per_dim < 1) {
    throw std::invalid_argument("mesh needs at least one interior node per dimension");
  }
}

double UniformMesh::mesh_size() const {
  return dim_ == 1 ? grid_spacing() : std::sqrt(2.0) * grid_spacing();
}

Point UniformMesh::node(Eigen::Index dof) const {
  if (dof < 0 || dof >= dof_count()) throw std::out_of_range("dof index out of range");
  Point p(dim_);
  p(0) = static_cast<double>(dof % n_ + 1) * grid_spacing();
  if (dim_ == 2) p(1) = static_cast<double>(dof / n_ + 1) * grid_spacing();
  return p;
}

UniformMesh build_mesh(int dim, Eigen::Index interior_per_dim) { return UniformMesh(dim, interior_per_dim); }

namespace {

struct AxisLocation {
  Eigen::Index cell;  // 0..n, left node index in 0..n+1 numbering
  double t;           // local coordinate in [0,1]
};

AxisLocation locate_axis(double x, Eigen::Index n) {
  const double pos = x * static_cast<double>(n + 1);
  const double nearest = std::round(pos);
  const double snapped = std::abs(pos - nearest) < 1e-12 ? nearest : pos;
  auto cell = static_cast<Eigen::Index>(std::floor(snapped));
  if (cell > n) cell = n;
  return {cell, snapped - static_cast<double>(cell)};
}

}  // namespace

BasisStencil basis_stencil(const UniformMesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != mesh.dim()) throw std::invalid_argument("point dimension does not match mesh");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= 0.0 && x(i) <= 1.0)) throw std::out_of_range("point outside [0,1]^d");
  }
  const Eigen::Index n = mesh.interior_per_dim();
  BasisStencil out;
  // Node numbering 0..n+1 per axis; 0 and n+1 are boundary nodes.
  auto push = [&](Eigen::Index a, Eigen::Index b, double v) {
    if (a < 1 || a > n || b < 1 || b > n || v == 0.0) return;
    out.dof[out.count] = (a - 1) + n * (b - 1);
    out.value[out.count] = v;
    ++out.count;
  };

  const AxisLocation lx = locate_axis(x(0), n);
  if (mesh.dim() == 1) {
    push(lx.cell, 1, 1.0 - lx.t);
    push(lx.cell + 1, 1, lx.t);
    return out;
  }
  const AxisLocation ly = locate_axis(x(1), n);
  const Eigen::Index a = lx.cell, b = ly.cell;
  const double s = lx.t, t = ly.t;
  if (s >= t) {
    push(a, b, 1.0 - s);
    push(a + 1, b, s - t);
    push(a + 1, b + 1, t);
  } else {
    push(a, b, 1.0 - t);
    push(a, b + 1, t - s);
    push(a + 1, b + 1, s);
  }
  return out;
}

Eigen::SparseVector<double> basis_eval(const UniformMesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const BasisStencil st = basis_stencil(mesh, x);
  Eigen::SparseVector<double> phi(mesh.dof_count());
  for (int i = 0; i < st.count; ++i) phi.coeffRef(st.dof[i]) = st.value[i];
  return phi;
}

}  // namespace fracfield
