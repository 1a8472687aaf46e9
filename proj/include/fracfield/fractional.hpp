#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "fracfield/assembly.hpp"
#include "fracfield/sinc.hpp"

namespace fracfield {

/// Raised when a dense N_h x N_h allocation would exceed the configured cap.
class MemoryBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{4} << 30;

/// Bytes of a dense double matrix with n x n entries.
inline std::size_t dense_bytes(Eigen::Index n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * sizeof(double);
}

void check_dense_budget(Eigen::Index n, std::size_t matrices, std::size_t cap, const std::string& what);

/// Approximation of L_h^{-beta} acting on load vectors.
///
/// A load vector b holds (f, phi_j); the result is the coefficient vector of
/// L_h^{-beta} P_h f in the nodal basis, i.e. (M^{-1} K)^{-beta} M^{-1} b.
/// This is the seam for alternative backends (e.g. rational approximation).
class FractionalInverse {
 public:
  virtual ~FractionalInverse() = default;
  virtual Eigen::Index size() const = 0;
  virtual Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& load) const = 0;
  virtual std::string backend() const = 0;
};

/// Sparse LDL^T factorization (AMD ordering) of one shifted matrix, with
/// triangular solves that sweep a block of right-hand sides at once.
class ShiftedFactor {
 public:
  explicit ShiftedFactor(const SparseSymMatrix& a);

  Eigen::Index size() const { return diag_.size(); }
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& b) const;

  /// Solves A X = [e_first, ..., e_{first+cols-1}] and adds weight * X to
  /// `acc`, an N x cols row-major buffer. `scratch` is caller-owned.
  void add_unit_block(Eigen::Index first, Eigen::Index cols, double weight, double* acc,
                      std::vector<double>& scratch) const;
  std::size_t memory_bytes() const;

 private:
  void sweep(double* y, Eigen::Index width, Eigen::Index start) const;

  Eigen::SimplicialLDLT<SparseSymMatrix> ldlt_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd inv_diag_;
  Eigen::VectorXi perm_;  // y(perm(i)) = b(i)
};

/// Operator-apply mode of the sinc quadrature: one sparse LDL^T
/// factorization per node, each reused for every right-hand side.
class SincOperator final : public FractionalInverse {
 public:
  /// `op` is K = kappa^2 M + S. Factorizations may be built on `threads` workers.
  SincOperator(const SparseSymMatrix& mass, const SparseSymMatrix& op, SincScheme scheme, int threads = 1);

  Eigen::Index size() const override { return size_; }
  /// Weighted sum of the shifted solves, accumulated in ascending node order.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& load) const override;
  std::string backend() const override { return "sinc-operator"; }

  const SincScheme& scheme() const { return scheme_; }

 private:
  Eigen::Index size_;
  SincScheme scheme_;
  std::vector<std::unique_ptr<ShiftedFactor>> factors_;
};

/// Dense matrix mode: apply(b) = Q b.
class DenseOperator final : public FractionalInverse {
 public:
  explicit DenseOperator(Eigen::MatrixXd matrix, std::string backend = "dense");

  Eigen::Index size() const override { return matrix_.rows(); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& load) const override;
  std::string backend() const override { return backend_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
  std::string backend_;
};

struct AssemblyOptions {
  int threads = 1;
  std::size_t memory_cap_bytes = kDefaultMemoryCap;
  /// Columns per task. Fixed independently of `threads` so the result does
  /// not depend on the worker count.
  Eigen::Index block_width = 32;
  /// Factorizations held at once; nodes are processed in chunks under it.
  std::size_t factor_memory_bytes = std::size_t{512} << 20;
};

/// Dense Q = (2 k sin(pi beta) / pi) sum_l e^{2 beta y_l} (M + e^{2 y_l} K)^{-1},
/// built column block by column block from the same shifted solves as
/// SincOperator::apply, then symmetrized as (Q + Q^T)/2.
Eigen::MatrixXd assemble_Q(const SparseSymMatrix& mass, const SparseSymMatrix& op, const SincScheme& scheme,
                           const AssemblyOptions& options = {});

/// K v = lambda M v with M-orthonormal eigenvectors (ascending eigenvalues).
struct GeneralizedEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

inline constexpr Eigen::Index kOracleMaxSize = 4096;

GeneralizedEigen generalized_eigen(const SparseSymMatrix& mass, const SparseSymMatrix& op);

/// Dense matrix of b -> sum_j lambda_j^{-beta} (v_j^T b) v_j, the exact
/// L_h^{-beta} on load vectors. Test oracle; limited to N_h <= 4096.
Eigen::MatrixXd oracle_fractional_inverse(const SparseSymMatrix& mass, const SparseSymMatrix& op, double beta);
Eigen::MatrixXd oracle_fractional_inverse(const GeneralizedEigen& eig, double beta);

}  // namespace fracfield
