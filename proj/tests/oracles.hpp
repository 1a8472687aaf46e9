#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "fracfield/mesh.hpp"

namespace fracfield::oracle {

/// Element-by-element P1 assembly on the full grid (boundary nodes included),
/// then restriction to interior nodes. Returns {mass, stiffness} as dense matrices.
struct DenseFem {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
};

inline DenseFem element_assembly(int dim, Eigen::Index n) {
  const Eigen::Index g = n + 2;  // grid points per axis
  const double h = 1.0 / static_cast<double>(n + 1);
  const Eigen::Index total = dim == 1 ? g : g * g;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(total, total), s = Eigen::MatrixXd::Zero(total, total);
  if (dim == 1) {
    for (Eigen::Index e = 0; e + 1 < g; ++e) {
      const Eigen::Index v[2] = {e, e + 1};
      const double lm[2][2] = {{h / 3, h / 6}, {h / 6, h / 3}};
      const double ls[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          m(v[a], v[b]) += lm[a][b];
          s(v[a], v[b]) += ls[a][b];
        }
      }
    }
  } else {
    auto id = [g](Eigen::Index ix, Eigen::Index iy) { return ix + g * iy; };
    for (Eigen::Index cy = 0; cy + 1 < g; ++cy) {
      for (Eigen::Index cx = 0; cx + 1 < g; ++cx) {
        // both triangles share the diagonal (cx,cy)-(cx+1,cy+1)
        const Eigen::Index tris[2][3][2] = {{{cx, cy}, {cx + 1, cy}, {cx + 1, cy + 1}},
                                            {{cx, cy}, {cx + 1, cy + 1}, {cx, cy + 1}}};
        for (const auto& t : tris) {
          Eigen::Matrix<double, 3, 2> p;
          for (int a = 0; a < 3; ++a) p.row(a) << h * static_cast<double>(t[a][0]), h * static_cast<double>(t[a][1]);
          Eigen::Matrix3d coords;
          coords << Eigen::Vector3d::Ones(), p;
          const double area = 0.5 * std::abs(coords.determinant());
          // gradients of barycentric coordinates: rows 1..2 of coords^{-1}
          const Eigen::Matrix3d inv = coords.inverse();
          const Eigen::Matrix<double, 2, 3> grads = inv.bottomRows<2>();
          for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
              const Eigen::Index ia = id(t[a][0], t[a][1]), ib = id(t[b][0], t[b][1]);
              m(ia, ib) += area / 12.0 * (a == b ? 2.0 : 1.0);
              s(ia, ib) += area * grads.col(a).dot(grads.col(b));
            }
          }
        }
      }
    }
  }
  std::vector<Eigen::Index> interior;
  for (Eigen::Index k = 0; k < total; ++k) {
    const Eigen::Index ix = k % g, iy = k / g;
    const bool inside = dim == 1 ? (k >= 1 && k <= n) : (ix >= 1 && ix <= n && iy >= 1 && iy <= n);
    if (inside) interior.push_back(k);
  }
  const auto sz = static_cast<Eigen::Index>(interior.size());
  DenseFem out{Eigen::MatrixXd(sz, sz), Eigen::MatrixXd(sz, sz)};
  for (Eigen::Index i = 0; i < sz; ++i) {
    for (Eigen::Index j = 0; j < sz; ++j) {
      out.mass(i, j) = m(interior[i], interior[j]);
      out.stiffness(i, j) = s(interior[i], interior[j]);
    }
  }
  return out;
}

/// sum_{j=1}^{terms} lambda_j^{-2 beta} 2 sin^2(pi j x), d=1, summed from the tail up in long double.
inline double variance_series_1d(double kappa, double beta, double x, long terms) {
  long double sum = 0.0L;
  const long double pi = std::numbers::pi_v<long double>;
  for (long j = terms; j >= 1; --j) {
    const long double lambda = static_cast<long double>(kappa) * kappa + pi * pi * static_cast<long double>(j) * j;
    const long double s = std::sin(pi * static_cast<long double>(j) * x);
    sum += 2.0L * s * s * std::pow(lambda, -2.0L * beta);
  }
  return static_cast<double>(sum);
}

/// sum_{j > terms} 2 lambda_j^{-2 beta}, bounded by the integral from `terms`.
inline double variance_tail_bound_1d(double beta, long terms) {
  const double pi = std::numbers::pi;
  const double e = 4.0 * beta;  // lambda^{-2beta} <= (pi j)^{-4 beta}
  return 2.0 * std::pow(pi, -e) * std::pow(static_cast<double>(terms), 1.0 - e) / (e - 1.0);
}

/// Sample mean and unbiased variance of a series of values.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  long count = 0;
};

class Accumulator {
 public:
  void add(double v) {
    ++n_;
    const double d = v - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (v - mean_);
  }
  Moments get() const { return {mean_, n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0, n_}; }

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace fracfield::oracle
