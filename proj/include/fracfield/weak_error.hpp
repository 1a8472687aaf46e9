#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>

#include "fracfield/assembly.hpp"
#include "fracfield/fractional.hpp"
#include "fracfield/mesh.hpp"
#include "fracfield/sinc.hpp"
#include "fracfield/spectral.hpp"

namespace fracfield {

/// sigma_h(x)^2 = phi_h(x)^T Q M Q^T phi_h(x) on every grid point.
///
/// Only the entries of C = Q M Q^T on the sparsity pattern of M are needed
/// (two basis functions share an element iff M couples them); they are
/// formed as C_ij = q_i . (M q_j) and symmetrized. Negative round-off is
/// clamped to zero and counted in `clamped` when given.
Eigen::ArrayXXd discrete_variance_grid(const Eigen::MatrixXd& q, const SparseSymMatrix& mass, const UniformMesh& mesh,
                                       const EvalGrid& grid, Eigen::Index* clamped = nullptr, int threads = 1);

/// C = Q M Q^T restricted to the pattern of M.
SparseSymMatrix field_covariance_on_pattern(const Eigen::MatrixXd& q, const SparseSymMatrix& mass, int threads = 1);

/// Same formulas as reference_expectation, fed with sigma_h^2.
inline double discrete_expectation(const Functional& f, const Eigen::ArrayXXd& variance, const EvalGrid& grid) {
  return expectation(f, variance, grid);
}

inline double weak_error(double e_ref, double e_disc) { return std::abs(e_ref - e_disc); }

/// Least-squares line ln(err) = intercept + rate * ln(h).
template <typename Scalar = double>
struct RateFit {
  Scalar intercept;
  Scalar rate;
  Eigen::Index points_used;
  Eigen::Index points_dropped;  // zero errors, which have no logarithm
};

template <typename Scalar = double>
RateFit<Scalar> fit_rate(std::span<const Scalar> h, std::span<const Scalar> err) {
  if (h.size() != err.size()) throw std::invalid_argument("fit_rate: h and err lengths differ");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> design(static_cast<Eigen::Index>(h.size()), 2);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs(static_cast<Eigen::Index>(h.size()));
  Eigen::Index used = 0, dropped = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > Scalar(0) && h[i] < Scalar(1))) throw std::invalid_argument("fit_rate: h must lie in (0,1)");
    if (!(err[i] >= Scalar(0)) || !std::isfinite(err[i])) throw std::invalid_argument("fit_rate: bad error value");
    if (err[i] == Scalar(0)) {
      ++dropped;
      continue;
    }
    design(used, 0) = Scalar(1);
    design(used, 1) = std::log(h[i]);
    rhs(used) = std::log(err[i]);
    ++used;
  }
  if (used < 2) throw std::invalid_argument("fit_rate: fewer than 2 usable points");
  const Eigen::Matrix<Scalar, 2, 1> coef =
      design.topRows(used).colPivHouseholderQr().solve(rhs.head(used));
  return {coef(0), coef(1), used, dropped};
}

/// Parameters of a weak-convergence study.
struct StudyConfig {
  int dim = 1;
  double kappa = 0.5;
  std::vector<double> betas{0.6, 0.7, 0.8, 0.9};
  std::vector<Eigen::Index> meshes{511, 1023, 2047, 4095};  // interior nodes per dimension
  std::string calibration = "experiment";
  Eigen::Index n_ok = 1 + (Eigen::Index{1} << 18);
  /// Points per dimension of the shared evaluation grid; 0 means n_ok.
  Eigen::Index eval_points = 0;
  std::vector<Functional> functionals{Functional::abs_power(2), Functional::abs_power(3), Functional::abs_power(4),
                                      Functional::probit(0.5, 20.0)};
  int threads = 1;
  std::size_t memory_cap_bytes = kDefaultMemoryCap;

  static StudyConfig defaults(int dim);
  Eigen::Index grid_points() const { return eval_points > 0 ? eval_points : n_ok; }
  void validate() const;
  /// Parameter list recorded in artifact headers (excludes thread count).
  std::map<std::string, std::string> provenance() const;
};

struct StudyRow {
  double beta;
  int dim;
  Eigen::Index dofs;
  double h;
  double k;
  Eigen::Index k_minus;
  Eigen::Index k_plus;
  std::string functional;
  double e_ref;
  double e_disc;
  double abs_error;
};

struct StudyRate {
  double beta;
  int dim;
  std::string functional;
  double rate_observed;
  double rate_theory;
  double intercept;
};

struct StudyFailure {
  double beta;
  Eigen::Index dofs;  // 0 when the failure is not tied to one mesh
  std::string message;
};

struct StudyResult {
  std::vector<StudyRow> rows;    // ordered by (beta, mesh, functional)
  std::vector<StudyRate> rates;  // ordered by (beta, functional)
  std::vector<StudyFailure> failures;
  std::vector<std::string> warnings;
  std::map<std::string, std::string> provenance;
  Eigen::Index clamped_points = 0;

  bool ok() const { return failures.empty(); }
};

/// min{4 beta - d, 2}, the weak rate for kappa^2 - Laplace on the unit cube.
inline double theoretical_weak_rate(double beta, int dim) { return std::min(4.0 * beta - dim, 2.0); }

/// One planned (beta, mesh) cell, for dry runs.
struct StudyCell {
  double beta;
  Eigen::Index interior;
  Eigen::Index dofs;
  double h;
  double k;
  Eigen::Index nodes;
};

std::vector<StudyCell> plan_study(const StudyConfig& config);

using StudyProgress = std::function<void(const std::string&)>;

/// Runs every (beta, mesh) cell: assembles Q, evaluates sigma_h^2 and all
/// functionals, compares against the truncated spectral reference, and fits
/// one rate per (beta, functional). Failed cells are recorded and skipped.
StudyResult run_study(const StudyConfig& config, const StudyProgress& progress = {});

}  // namespace fracfield
