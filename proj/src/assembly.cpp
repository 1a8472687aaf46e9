#include "fracfield/assembly.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace fracfield {

SparseSymMatrix shifted_operator(const SparseSymMatrix& mass, const SparseSymMatrix& stiffness, double kappa) {
  if (mass.rows() != stiffness.rows() || mass.cols() != stiffness.cols()) {
    throw std::invalid_argument("mass and stiffness dimensions differ");
  }
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
  SparseSymMatrix k = kappa * kappa * mass + stiffness;
  return k;
}

void write_coordinate_text(std::ostream& os, const SparseSymMatrix& matrix) {
  char buf[64];
  for (int col = 0; col < matrix.outerSize(); ++col) {
    for (SparseSymMatrix::InnerIterator it(matrix, col); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof(buf), it.value());
      os << it.row() << ' ' << it.col() << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
  }
}

}  // namespace fracfield
