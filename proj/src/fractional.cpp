#include "fracfield/fractional.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "fracfield/parallel.hpp"

namespace fracfield {

void check_dense_budget(Eigen::Index n, std::size_t matrices, std::size_t cap, const std::string& what) {
  const std::size_t need = matrices * dense_bytes(n);
  if (need > cap) {
    std::ostringstream msg;
    msg << what << " needs " << need << " bytes for N_h = " << n << ", above the memory cap of " << cap
        << " bytes";
    throw MemoryBudgetExceeded(msg.str());
  }
}

namespace {

void check_pair(const SparseSymMatrix& mass, const SparseSymMatrix& op) {
  if (mass.rows() != mass.cols() || op.rows() != op.cols() || mass.rows() != op.rows()) {
    throw std::invalid_argument("mass and operator matrices must be square with equal size");
  }
  if (mass.rows() == 0) throw std::invalid_argument("empty system");
}

SparseSymMatrix shifted_matrix(const SparseSymMatrix& mass, const SparseSymMatrix& op, const ShiftedTerm& t) {
  SparseSymMatrix a = t.mass_coeff * mass + t.operator_coeff * op;
  return a;
}

}  // namespace

ShiftedFactor::ShiftedFactor(const SparseSymMatrix& a) {
  ldlt_.compute(a);
  if (ldlt_.info() != Eigen::Success) {
    throw std::runtime_error("shifted matrix is not symmetric positive definite");
  }
  diag_ = ldlt_.vectorD();
  inv_diag_ = diag_.cwiseInverse();
  const Eigen::Index n = a.rows();
  if (ldlt_.permutationP().size() == n) {
    perm_ = ldlt_.permutationP().indices();
  } else {
    perm_ = Eigen::VectorXi::LinSpaced(n, 0, static_cast<int>(n - 1));
  }
}

void ShiftedFactor::sweep(double* y, Eigen::Index width, Eigen::Index start) const {
  const auto& l = ldlt_.matrixL().nestedExpression();
  const int* outer = l.outerIndexPtr();
  const int* inner = l.innerIndexPtr();
  const double* values = l.valuePtr();
  const Eigen::Index n = size();
  const bool compressed = l.isCompressed();
  auto col_end = [&](Eigen::Index i) { return compressed ? outer[i + 1] : outer[i] + l.innerNonZeroPtr()[i]; };

  // L y = b (unit lower); rows before `start` are zero and stay zero.
  for (Eigen::Index i = start; i < n; ++i) {
    const double* yi = y + i * width;
    for (int p = outer[i]; p < col_end(i); ++p) {
      double* yr = y + static_cast<Eigen::Index>(inner[p]) * width;
      const double v = values[p];
      for (Eigen::Index c = 0; c < width; ++c) yr[c] -= v * yi[c];
    }
  }
  for (Eigen::Index i = start; i < n; ++i) {
    double* yi = y + i * width;
    const double d = inv_diag_(i);
    for (Eigen::Index c = 0; c < width; ++c) yi[c] *= d;
  }
  // L^T x = y (unit upper)
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double* yi = y + i * width;
    for (int p = outer[i]; p < col_end(i); ++p) {
      const double* yr = y + static_cast<Eigen::Index>(inner[p]) * width;
      const double v = values[p];
      for (Eigen::Index c = 0; c < width; ++c) yi[c] -= v * yr[c];
    }
  }
}

Eigen::VectorXd ShiftedFactor::solve(const Eigen::Ref<const Eigen::VectorXd>& b) const {
  const Eigen::Index n = size();
  if (b.size() != n) throw std::invalid_argument("right-hand side has the wrong length");
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(perm_(i)) = b(i);
  sweep(y.data(), 1, 0);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = y(perm_(i));
  return x;
}

void ShiftedFactor::add_unit_block(Eigen::Index first, Eigen::Index cols, double weight, double* acc,
                                   std::vector<double>& scratch) const {
  const Eigen::Index n = size();
  scratch.assign(static_cast<std::size_t>(n * cols), 0.0);
  double* y = scratch.data();
  Eigen::Index start = n;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const Eigen::Index row = perm_(first + c);
    y[row * cols + c] = 1.0;
    start = std::min(start, row);
  }
  sweep(y, cols, start);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* yi = y + static_cast<Eigen::Index>(perm_(i)) * cols;
    double* dst = acc + i * cols;
    for (Eigen::Index c = 0; c < cols; ++c) dst[c] += weight * yi[c];
  }
}

std::size_t ShiftedFactor::memory_bytes() const {
  const auto& l = ldlt_.matrixL().nestedExpression();
  return static_cast<std::size_t>(l.nonZeros()) * (sizeof(double) + sizeof(int)) +
         static_cast<std::size_t>(size()) * (4 * sizeof(double) + 2 * sizeof(int));
}

SincOperator::SincOperator(const SparseSymMatrix& mass, const SparseSymMatrix& op, SincScheme scheme, int threads)
    : size_(mass.rows()), scheme_(scheme) {
  check_pair(mass, op);
  factors_.resize(static_cast<std::size_t>(scheme_.node_count()));
  parallel_for(scheme_.node_count(), threads, [&](Eigen::Index i, int) {
    factors_[static_cast<std::size_t>(i)] = std::make_unique<ShiftedFactor>(shifted_matrix(mass, op, scheme_.term(i)));
  });
}

Eigen::VectorXd SincOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& load) const {
  if (load.size() != size_) throw std::invalid_argument("load vector has the wrong length");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(size_);
  for (Eigen::Index i = 0; i < scheme_.node_count(); ++i) {
    sum += scheme_.term(i).weight * factors_[static_cast<std::size_t>(i)]->solve(load);
  }
  return sum;
}

DenseOperator::DenseOperator(Eigen::MatrixXd matrix, std::string backend)
    : matrix_(std::move(matrix)), backend_(std::move(backend)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("dense operator must be square");
}

Eigen::VectorXd DenseOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& load) const {
  if (load.size() != matrix_.cols()) throw std::invalid_argument("load vector has the wrong length");
  return matrix_ * load;
}

Eigen::MatrixXd assemble_Q(const SparseSymMatrix& mass, const SparseSymMatrix& op, const SincScheme& scheme,
                           const AssemblyOptions& options) {
  check_pair(mass, op);
  const Eigen::Index n = mass.rows();
  const Eigen::Index width = std::max<Eigen::Index>(1, options.block_width);
  const Eigen::Index blocks = (n + width - 1) / width;
  const int workers = std::max(1, options.threads);
  check_dense_budget(n, 1, options.memory_cap_bytes, "dense quadrature matrix");

  // Each column block of q is copied to a row-major buffer, receives the
  // solves of a chunk of nodes in ascending order, and is written back. The
  // per-entry summation order is therefore independent of chunking and threads.
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<double>> scratch(static_cast<std::size_t>(workers));
  std::vector<std::vector<double>> acc(static_cast<std::size_t>(workers));
  std::vector<std::unique_ptr<ShiftedFactor>> factors;
  const Eigen::Index count = scheme.node_count();
  Eigen::Index chunk = 1;
  for (Eigen::Index begin = 0; begin < count; begin += chunk) {
    if (begin == 0) {
      const ShiftedFactor probe(shifted_matrix(mass, op, scheme.term(0)));
      chunk = static_cast<Eigen::Index>(std::max<std::size_t>(1, options.factor_memory_bytes / probe.memory_bytes()));
    }
    const Eigen::Index end = std::min(count, begin + chunk);
    factors.clear();
    factors.resize(static_cast<std::size_t>(end - begin));
    parallel_for(end - begin, workers, [&](Eigen::Index i, int) {
      try {
        factors[static_cast<std::size_t>(i)] =
            std::make_unique<ShiftedFactor>(shifted_matrix(mass, op, scheme.term(begin + i)));
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string(e.what()) + " (quadrature node " + std::to_string(begin + i) + ")");
      }
    });
    parallel_for(blocks, workers, [&](Eigen::Index block, int worker) {
      const Eigen::Index first = block * width;
      const Eigen::Index cols = std::min(width, n - first);
      auto& buf = acc[static_cast<std::size_t>(worker)];
      buf.resize(static_cast<std::size_t>(n * cols));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) buf[static_cast<std::size_t>(i * cols + c)] = q(first + c, i);
      }
      for (Eigen::Index node = begin; node < end; ++node) {
        factors[static_cast<std::size_t>(node - begin)]->add_unit_block(
            first, cols, scheme.term(node).weight, buf.data(), scratch[static_cast<std::size_t>(worker)]);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < cols; ++c) q(first + c, i) = buf[static_cast<std::size_t>(i * cols + c)];
      }
    });
  }
  // q holds the transposed solves; each summand is symmetric, so only
  // solver round-off separates q from q^T.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double avg = 0.5 * (q(i, j) + q(j, i));
      q(i, j) = avg;
      q(j, i) = avg;
    }
  }
  return q;
}

GeneralizedEigen generalized_eigen(const SparseSymMatrix& mass, const SparseSymMatrix& op) {
  check_pair(mass, op);
  if (mass.rows() > kOracleMaxSize) {
    throw std::invalid_argument("eigendecomposition oracle is limited to N_h <= " + std::to_string(kOracleMaxSize));
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd(mass);
  const Eigen::MatrixXd k = Eigen::MatrixXd(op);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd oracle_fractional_inverse(const GeneralizedEigen& eig, double beta) {
  if (!(eig.values.minCoeff() > 0.0)) throw std::invalid_argument("operator is not positive definite");
  const Eigen::VectorXd scale = eig.values.array().pow(-beta).matrix();
  Eigen::MatrixXd out = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  return out;
}

Eigen::MatrixXd oracle_fractional_inverse(const SparseSymMatrix& mass, const SparseSymMatrix& op, double beta) {
  return oracle_fractional_inverse(generalized_eigen(mass, op), beta);
}

}  // namespace fracfield
