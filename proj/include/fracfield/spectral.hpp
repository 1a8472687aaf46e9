#pragma once

#include <string>

#include <Eigen/Core>

#include "fracfield/mesh.hpp"

namespace fracfield {

/// kappa^2 - Laplace with Dirichlet conditions on (0,1)^d, raised to -beta,
/// with its eigen-expansion truncated at `modes_per_dim` modes per axis.
struct SpectralModel {
  int dim = 1;
  double kappa = 0.5;
  double beta = 0.75;  // (0,1]; 1 is admitted for reference checks
  Eigen::Index modes_per_dim = 1 + (Eigen::Index{1} << 18);

  /// Eigenvalue growth exponent alpha = 2/d.
  double growth_exponent() const { return 2.0 / dim; }
  void validate() const;
};

using MultiIndex = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

/// lambda_j = kappa^2 + pi^2 |j|^2 and e_j(x) = prod_i sqrt(2) sin(pi j_i x_i).
struct Eigenpair {
  double eigenvalue = 0.0;
  MultiIndex index;
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

Eigenpair eigenpair(const SpectralModel& model, const MultiIndex& j);

/// Tensor grid of `points_per_dim` equally spaced points per axis, both
/// endpoints included (spacing 1 / (points_per_dim - 1)).
struct EvalGrid {
  int dim = 1;
  Eigen::Index points_per_dim = 2;

  EvalGrid() = default;
  EvalGrid(int d, Eigen::Index points);

  double spacing() const { return 1.0 / static_cast<double>(points_per_dim - 1); }
  double coordinate(Eigen::Index m) const { return static_cast<double>(m) * spacing(); }
  Eigen::ArrayXd axis() const;
  /// Composite trapezoidal weights along one axis; they sum to one.
  Eigen::ArrayXd trapezoid_weights() const;
  /// Shape of a value array on this grid: points x points (2D) or points x 1.
  Eigen::Index rows() const { return points_per_dim; }
  Eigen::Index cols() const { return dim == 2 ? points_per_dim : 1; }
};

/// Trapezoidal rule on the unit cube for values laid out as EvalGrid::rows() x cols().
double trapezoid(const Eigen::ArrayXXd& values, const EvalGrid& grid);

/// sigma(x)^2 = sum_{j <= N_ok} lambda_j^{-2 beta} e_j(x)^2 on every grid point.
///
/// Since e_j(x)^2 = prod_i s_{j_i}(x_i) with s_j(t) = 2 sin^2(pi j t), the 2D
/// sum is S * Lambda * S^T with S the (grid x modes) table of s_j. In 1D
/// s_j(t) = 1 - cos(2 pi j t), which on the uniform grid is a cosine
/// transform of period points-1; the coefficients are folded onto that
/// period and summed with one FFT. Boundary points are exactly zero.
Eigen::ArrayXXd reference_variance_grid(const SpectralModel& model, const EvalGrid& grid);

/// E|Z|^p for Z ~ N(0,1): sqrt(2^p / pi) Gamma((p+1)/2).
/// Even p evaluate to the exact integer (p-1)!!.
double moment_mu(int p);

/// Standard normal CDF.
double normal_cdf(double x);

/// sigma for (kappa^2 - Laplace)^beta u = sigma W to approximate a Matern
/// field with marginal standard deviation sigma_star.
double matern_scale(double sigma_star, double kappa, double beta, int dim);

/// f in phi(u) = int_D f(u(x)) dx: either |u|^p or Phi(c (u - a)).
class Functional {
 public:
  enum class Kind { abs_power, probit };

  static Functional abs_power(int p);
  static Functional probit(double shift, double slope);
  /// Parses "abs2", "abs3", ..., or "probit(a,c)".
  static Functional parse(const std::string& text);

  Kind kind() const { return kind_; }
  int power() const { return p_; }
  double shift() const { return a_; }
  double slope() const { return c_; }
  std::string name() const;

  /// E[f(U)] for U ~ N(0, variance).
  double expectation_at(double variance) const;

 private:
  Functional(Kind kind, int p, double a, double c) : kind_(kind), p_(p), a_(a), c_(c) {}
  Kind kind_;
  int p_;
  double a_;
  double c_;
  double mu_ = 0.0;
};

/// E[phi(u)] = int_D E[f(u(x))] dx for a centred Gaussian field with the
/// given pointwise variances, by the trapezoidal rule on `grid`.
double expectation(const Functional& f, const Eigen::ArrayXXd& variance, const EvalGrid& grid);

inline double reference_expectation(const Functional& f, const Eigen::ArrayXXd& variance, const EvalGrid& grid) {
  return expectation(f, variance, grid);
}

}  // namespace fracfield
