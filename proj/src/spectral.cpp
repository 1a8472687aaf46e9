#include "fracfield/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace fracfield {

using std::numbers::pi;

void SpectralModel::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("spectral model dimension must be 1 or 2");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0,1]");
  if (modes_per_dim < 1) throw std::invalid_argument("truncation N_ok must be positive");
}

double Eigenpair::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != index.size()) throw std::invalid_argument("point dimension does not match eigenpair");
  double value = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    value *= std::sqrt(2.0) * std::sin(pi * static_cast<double>(index(i)) * x(i));
  }
  return value;
}

Eigenpair eigenpair(const SpectralModel& model, const MultiIndex& j) {
  if (j.size() != model.dim) throw std::invalid_argument("multi-index length must equal the dimension");
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < j.size(); ++i) {
    if (j(i) < 1) throw std::invalid_argument("multi-index components must be >= 1");
    sum_sq += static_cast<double>(j(i)) * static_cast<double>(j(i));
  }
  return {model.kappa * model.kappa + pi * pi * sum_sq, j};
}

EvalGrid::EvalGrid(int d, Eigen::Index points) : dim(d), points_per_dim(points) {
  if (d != 1 && d != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (points < 2) throw std::invalid_argument("evaluation grid needs at least the two endpoints");
}

Eigen::ArrayXd EvalGrid::axis() const {
  Eigen::ArrayXd x(points_per_dim);
  for (Eigen::Index m = 0; m < points_per_dim; ++m) x(m) = coordinate(m);
  return x;
}

Eigen::ArrayXd EvalGrid::trapezoid_weights() const {
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(points_per_dim, spacing());
  w(0) *= 0.5;
  w(points_per_dim - 1) *= 0.5;
  return w;
}

double trapezoid(const Eigen::ArrayXXd& values, const EvalGrid& grid) {
  if (values.rows() != grid.rows() || values.cols() != grid.cols()) {
    throw std::invalid_argument("value array does not match the evaluation grid");
  }
  const Eigen::VectorXd w = grid.trapezoid_weights().matrix();
  if (grid.dim == 1) return w.dot(values.matrix().col(0));
  return w.dot(values.matrix() * w);
}

namespace {

Eigen::ArrayXXd variance_1d(const SpectralModel& model, const EvalGrid& grid) {
  const Eigen::Index period = grid.points_per_dim - 1;
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(grid.points_per_dim, 1);
  if (period < 2) return out;

  // sigma^2(m / P) = sum_j c_j - sum_j c_j cos(2 pi j m / P); fold j mod P.
  std::vector<double> folded(static_cast<std::size_t>(period), 0.0);
  const double k2 = model.kappa * model.kappa;
  double total = 0.0;
  for (Eigen::Index j = 1; j <= model.modes_per_dim; ++j) {
    const double jd = static_cast<double>(j);
    const double c = std::pow(k2 + pi * pi * jd * jd, -2.0 * model.beta);
    total += c;
    folded[static_cast<std::size_t>(j % period)] += c;
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, folded);
  for (Eigen::Index m = 1; m < period; ++m) {
    out(m, 0) = std::max(0.0, total - spectrum[static_cast<std::size_t>(m)].real());
  }
  return out;
}

Eigen::ArrayXXd variance_2d(const SpectralModel& model, const EvalGrid& grid) {
  const Eigen::Index points = grid.points_per_dim;
  const Eigen::Index period = points - 1;
  const Eigen::Index modes = model.modes_per_dim;

  // s_j(m / P) = 2 sin^2(pi j m / P) depends on j m mod P only.
  Eigen::ArrayXd table(period);
  for (Eigen::Index r = 0; r < period; ++r) {
    const double s = std::sin(pi * static_cast<double>(r) / static_cast<double>(period));
    table(r) = 2.0 * s * s;
  }
  Eigen::MatrixXd basis(points, modes);
  for (Eigen::Index j = 0; j < modes; ++j) {
    for (Eigen::Index m = 0; m < points; ++m) basis(m, j) = table(((j + 1) * m) % period);
  }
  Eigen::MatrixXd coef(modes, modes);
  const double k2 = model.kappa * model.kappa;
  for (Eigen::Index j2 = 0; j2 < modes; ++j2) {
    const double b = static_cast<double>(j2 + 1);
    for (Eigen::Index j1 = 0; j1 < modes; ++j1) {
      const double a = static_cast<double>(j1 + 1);
      coef(j1, j2) = std::pow(k2 + pi * pi * (a * a + b * b), -2.0 * model.beta);
    }
  }
  Eigen::MatrixXd partial = basis * coef;
  Eigen::ArrayXXd out = (partial * basis.transpose()).array().max(0.0);
  out.row(0).setZero();
  out.row(points - 1).setZero();
  out.col(0).setZero();
  out.col(points - 1).setZero();
  return out;
}

}  // namespace

Eigen::ArrayXXd reference_variance_grid(const SpectralModel& model, const EvalGrid& grid) {
  model.validate();
  if (grid.dim != model.dim) throw std::invalid_argument("grid and model dimensions differ");
  if (!(4.0 * model.beta / model.dim > 1.0)) {
    throw std::invalid_argument("variance series diverges: need 4*beta/d > 1");
  }
  return model.dim == 1 ? variance_1d(model, grid) : variance_2d(model, grid);
}

double moment_mu(int p) {
  if (p < 1) throw std::invalid_argument("moment order must be >= 1");
  if (p % 2 == 0) {
    double v = 1.0;
    for (int q = p - 1; q > 1; q -= 2) v *= q;
    return v;
  }
  // sqrt(2/pi) * 2^{(p-1)/2} * ((p-1)/2)!
  double v = std::sqrt(2.0 / pi);
  for (int q = 1; q <= (p - 1) / 2; ++q) v *= 2.0 * q;
  return v;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double matern_scale(double sigma_star, double kappa, double beta, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!(2.0 * beta - 0.5 * dim > 0.0)) throw std::invalid_argument("need 2*beta > d/2 (Gamma pole)");
  if (!(sigma_star >= 0.0)) throw std::invalid_argument("sigma_star must be nonnegative");
  return sigma_star * std::pow(4.0 * pi, 0.25 * dim) * std::pow(kappa, 2.0 * beta - 0.5 * dim) *
         std::sqrt(std::tgamma(2.0 * beta) / std::tgamma(2.0 * beta - 0.5 * dim));
}

Functional Functional::abs_power(int p) {
  if (p < 2) throw std::invalid_argument("|u|^p functional needs p >= 2");
  Functional f(Kind::abs_power, p, 0.0, 0.0);
  f.mu_ = moment_mu(p);
  return f;
}

Functional Functional::probit(double shift, double slope) {
  if (!std::isfinite(shift)) throw std::invalid_argument("probit shift must be finite");
  if (!(slope > 0.0) || !std::isfinite(slope)) throw std::invalid_argument("probit slope must be positive");
  return Functional(Kind::probit, 0, shift, slope);
}

Functional Functional::parse(const std::string& text) {
  if (text.rfind("abs", 0) == 0 && text.size() > 3) {
    std::size_t used = 0;
    const int p = std::stoi(text.substr(3), &used);
    if (used != text.size() - 3) throw std::invalid_argument("bad functional: " + text);
    return abs_power(p);
  }
  if (text.rfind("probit(", 0) == 0 && text.back() == ')') {
    const std::string body = text.substr(7, text.size() - 8);
    const auto comma = body.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("bad functional: " + text);
    std::size_t used_a = 0, used_c = 0;
    const std::string a = body.substr(0, comma), c = body.substr(comma + 1);
    const double shift = std::stod(a, &used_a);
    const double slope = std::stod(c, &used_c);
    if (used_a != a.size() || used_c != c.size()) throw std::invalid_argument("bad functional: " + text);
    return probit(shift, slope);
  }
  throw std::invalid_argument("unknown functional '" + text + "' (expected absN or probit(a,c))");
}

std::string Functional::name() const {
  if (kind_ == Kind::abs_power) return "abs" + std::to_string(p_);
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  return "probit(" + fmt(a_) + "," + fmt(c_) + ")";
}

double Functional::expectation_at(double variance) const {
  if (kind_ == Kind::probit) return normal_cdf(-a_ / std::sqrt(1.0 / (c_ * c_) + variance));
  double v = 1.0;
  for (int q = 0; q < p_ / 2; ++q) v *= variance;
  if (p_ % 2 == 1) v *= std::sqrt(variance);
  return mu_ * v;
}

double expectation(const Functional& f, const Eigen::ArrayXXd& variance, const EvalGrid& grid) {
  return trapezoid(variance.unaryExpr([&f](double s2) { return f.expectation_at(s2); }), grid);
}

}  // namespace fracfield
