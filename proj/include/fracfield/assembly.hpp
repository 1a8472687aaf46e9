#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "fracfield/mesh.hpp"

namespace fracfield {

/// Symmetric sparse matrix; both triangles are stored.
template <typename Scalar = double>
using SparseSym = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, int>;
using SparseSymMatrix = SparseSym<double>;

namespace detail {

template <typename Scalar, typename Stencil>
SparseSym<Scalar> assemble_from_stencil(const UniformMesh& mesh, Stencil&& stencil) {
  const Eigen::Index n = mesh.interior_per_dim();
  const Eigen::Index size = mesh.dof_count();
  std::vector<Eigen::Triplet<Scalar, int>> triplets;
  if (mesh.dim() == 1) {
    triplets.reserve(static_cast<std::size_t>(3 * size));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int di = -1; di <= 1; ++di) {
        const Eigen::Index j = i + di;
        if (j < 0 || j >= n) continue;
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), stencil(di, 0));
      }
    }
  } else {
    // Edge neighbours of a node: the four axis neighbours and the two
    // diagonal neighbours along the split direction (+1,+1), (-1,-1).
    static constexpr int offsets[7][2] = {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}};
    triplets.reserve(static_cast<std::size_t>(7 * size));
    for (Eigen::Index iy = 0; iy < n; ++iy) {
      for (Eigen::Index ix = 0; ix < n; ++ix) {
        for (const auto& o : offsets) {
          const Eigen::Index jx = ix + o[0], jy = iy + o[1];
          if (jx < 0 || jx >= n || jy < 0 || jy >= n) continue;
          triplets.emplace_back(static_cast<int>(ix + n * iy), static_cast<int>(jx + n * jy), stencil(o[0], o[1]));
        }
      }
    }
  }
  SparseSym<Scalar> out(size, size);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace detail

/// Exact P1 mass matrix M_ij = (phi_i, phi_j).
/// 1D: 2h/3 on the diagonal, h/6 off it. 2D: h^2/2 on the diagonal, h^2/12
/// for each edge neighbour (h = grid spacing).
template <typename Scalar = double>
SparseSym<Scalar> assemble_mass(const UniformMesh& mesh) {
  const Scalar h = Scalar(1) / Scalar(mesh.interior_per_dim() + 1);
  if (mesh.dim() == 1) {
    return detail::assemble_from_stencil<Scalar>(
        mesh, [h](int dx, int) { return dx == 0 ? Scalar(2) * h / Scalar(3) : h / Scalar(6); });
  }
  return detail::assemble_from_stencil<Scalar>(
      mesh, [h](int dx, int dy) { return (dx == 0 && dy == 0) ? h * h / Scalar(2) : h * h / Scalar(12); });
}

/// Exact P1 stiffness matrix S_ij = (grad phi_i, grad phi_j).
/// 1D: 2/h, -1/h. 2D: the five-point stencil (4, -1); the diagonal
/// neighbours couple with an explicit zero so M and S share one pattern.
template <typename Scalar = double>
SparseSym<Scalar> assemble_stiffness(const UniformMesh& mesh) {
  const Scalar h = Scalar(1) / Scalar(mesh.interior_per_dim() + 1);
  if (mesh.dim() == 1) {
    return detail::assemble_from_stencil<Scalar>(
        mesh, [h](int dx, int) { return dx == 0 ? Scalar(2) / h : Scalar(-1) / h; });
  }
  return detail::assemble_from_stencil<Scalar>(mesh, [](int dx, int dy) {
    if (dx == 0 && dy == 0) return Scalar(4);
    if (dx == 0 || dy == 0) return Scalar(-1);
    return Scalar(0);
  });
}

/// kappa^2 M + S, the matrix of the bilinear form of kappa^2 - Laplace.
SparseSymMatrix shifted_operator(const SparseSymMatrix& mass, const SparseSymMatrix& stiffness, double kappa);

/// Debug dump: one "row col value" line per stored entry, 0-based.
void write_coordinate_text(std::ostream& os, const SparseSymMatrix& matrix);

}  // namespace fracfield
