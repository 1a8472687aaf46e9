#pragma once

#include <string>

#include <Eigen/Core>

namespace fracfield {

/// How the sinc step k is tied to the mesh size h.
///
/// experiment:  k = -1 / (beta ln h).
/// weak_theory: e^{-pi^2/(2k)} = h^rho with rho = d alpha beta (alpha beta < 1)
///              or d (2 alpha beta - 1) (alpha beta > 1), alpha = 2/d; for
///              alpha beta = 1, e^{-pi^2/(2k)} max{1, |ln h|} = h^d.
struct CalibrationStrategy {
  enum class Kind { experiment, weak_theory, weak_theory_log };
  Kind kind = Kind::experiment;
  double exponent = 0.0;

  static CalibrationStrategy experiment() { return {}; }
  static CalibrationStrategy weak_theory(int dim, double beta);
  static CalibrationStrategy parse(const std::string& name, int dim, double beta);
  std::string name() const;
};

double calibrate_k(double h, double beta, const CalibrationStrategy& strategy = CalibrationStrategy::experiment());

/// One summand of the quadrature:  weight * (mass_coeff M + operator_coeff K)^{-1}.
///
/// For y <= 0 this is e^{2 beta y} (M + e^{2y} K)^{-1}; for y > 0 the
/// factor e^{2y} is moved out of the inverse, giving
/// e^{2(beta-1) y} (e^{-2y} M + K)^{-1}, which never overflows.
/// `weight` includes the prefactor 2 k sin(pi beta) / pi.
struct ShiftedTerm {
  double weight;
  double mass_coeff;
  double operator_coeff;
};

/// Sinc quadrature for L_h^{-beta} on the nodes y_l = l k, l = -K^- .. K^+,
/// with K^- = ceil(pi^2 / (4 beta k^2)) and K^+ = ceil(pi^2 / (4 (1-beta) k^2)).
class SincScheme {
 public:
  SincScheme(double beta, double k);

  double beta() const { return beta_; }
  double step() const { return k_; }
  Eigen::Index k_minus() const { return k_minus_; }
  Eigen::Index k_plus() const { return k_plus_; }
  Eigen::Index node_count() const { return k_minus_ + k_plus_ + 1; }
  double prefactor() const;

  /// i-th node in ascending order, i = 0 .. node_count()-1.
  double node(Eigen::Index i) const { return static_cast<double>(i - k_minus_) * k_; }
  Eigen::ArrayXd nodes() const;
  ShiftedTerm term(Eigen::Index i) const;

  /// Scalar version of the quadrature, q(lambda) ~ lambda^{-beta}.
  double apply_scalar(double lambda) const;

 private:
  double beta_;
  double k_;
  Eigen::Index k_minus_;
  Eigen::Index k_plus_;
};

SincScheme build_scheme(double beta, double k);

}  // namespace fracfield
