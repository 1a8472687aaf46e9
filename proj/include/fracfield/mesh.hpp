#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fracfield {

/// A point of the unit interval or unit square (size 1 or 2).
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

/// Uniform simplicial mesh of [0,1]^d, d in {1,2}, with homogeneous
/// Dirichlet conditions: only the n^d interior nodes carry degrees of freedom.
///
/// Interior node (i_1, ..., i_d), 0 <= i_k < n, sits at ((i_k + 1) * spacing)
/// and has dof index i_1 + n * i_2 (lexicographic, x fastest). In 2D every
/// grid cell is split into two right triangles along its lower-left to
/// upper-right diagonal.
///
/// mesh_size() is the maximal element diameter: the grid spacing in 1D and
/// sqrt(2) times the grid spacing in 2D.
class UniformMesh {
 public:
  UniformMesh(int dim, Eigen::Index interior_per_dim);

  int dim() const { return dim_; }
  Eigen::Index interior_per_dim() const { return n_; }
  double grid_spacing() const { return 1.0 / static_cast<double>(n_ + 1); }
  double mesh_size() const;
  Eigen::Index dof_count() const { return dim_ == 1 ? n_ : n_ * n_; }

  Point node(Eigen::Index dof) const;

 private:
  int dim_;
  Eigen::Index n_;
};

UniformMesh build_mesh(int dim, Eigen::Index interior_per_dim);

/// Nonzero basis values at a point: at most d+1 interior hats.
struct BasisStencil {
  std::array<Eigen::Index, 3> dof{};
  std::array<double, 3> value{};
  int count = 0;
};

/// Locates x in the mesh and returns the interior hat functions that are
/// nonzero there. Hats of boundary nodes are dropped, so the values sum to
/// less than one next to the boundary and to zero on it.
BasisStencil basis_stencil(const UniformMesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& x);

/// phi_h(x) as a sparse vector of length dof_count().
Eigen::SparseVector<double> basis_eval(const UniformMesh& mesh, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace fracfield
