#include "fracfield/sinc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracfield {

using std::numbers::pi;

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1) for the sinc quadrature");
}

}  // namespace

CalibrationStrategy CalibrationStrategy::weak_theory(int dim, double beta) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  check_beta(beta);
  const double alpha = 2.0 / dim;
  const double ab = alpha * beta;
  if (std::abs(ab - 1.0) < 1e-12) return {Kind::weak_theory_log, static_cast<double>(dim)};
  return {Kind::weak_theory, ab < 1.0 ? dim * ab : dim * (2.0 * ab - 1.0)};
}

CalibrationStrategy CalibrationStrategy::parse(const std::string& name, int dim, double beta) {
  if (name == "experiment") return experiment();
  if (name == "weak-theory") return weak_theory(dim, beta);
  throw std::invalid_argument("unknown calibration strategy '" + name + "' (experiment | weak-theory)");
}

std::string CalibrationStrategy::name() const {
  return kind == Kind::experiment ? "experiment" : "weak-theory";
}

double calibrate_k(double h, double beta, const CalibrationStrategy& strategy) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("mesh size must lie in (0,1)");
  check_beta(beta);
  const double log_h = std::log(h);
  switch (strategy.kind) {
    case CalibrationStrategy::Kind::experiment:
      return -1.0 / (beta * log_h);
    case CalibrationStrategy::Kind::weak_theory:
      return pi * pi / (2.0 * strategy.exponent * std::abs(log_h));
    case CalibrationStrategy::Kind::weak_theory_log:
      return pi * pi / (2.0 * (strategy.exponent * std::abs(log_h) + std::log(std::max(1.0, std::abs(log_h)))));
  }
  throw std::logic_error("unhandled calibration strategy");
}

SincScheme::SincScheme(double beta, double k) : beta_(beta), k_(k) {
  check_beta(beta);
  if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("sinc step k must be positive");
  k_minus_ = static_cast<Eigen::Index>(std::ceil(pi * pi / (4.0 * beta * k * k)));
  k_plus_ = static_cast<Eigen::Index>(std::ceil(pi * pi / (4.0 * (1.0 - beta) * k * k)));
}

double SincScheme::prefactor() const { return 2.0 * k_ * std::sin(pi * beta_) / pi; }

Eigen::ArrayXd SincScheme::nodes() const {
  Eigen::ArrayXd y(node_count());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = node(i);
  return y;
}

ShiftedTerm SincScheme::term(Eigen::Index i) const {
  const double y = node(i);
  if (y <= 0.0) return {prefactor() * std::exp(2.0 * beta_ * y), 1.0, std::exp(2.0 * y)};
  return {prefactor() * std::exp(2.0 * (beta_ - 1.0) * y), std::exp(-2.0 * y), 1.0};
}

double SincScheme::apply_scalar(double lambda) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < node_count(); ++i) {
    const ShiftedTerm t = term(i);
    sum += t.weight / (t.mass_coeff + t.operator_coeff * lambda);
  }
  return sum;
}

SincScheme build_scheme(double beta, double k) { return SincScheme(beta, k); }

}  // namespace fracfield
