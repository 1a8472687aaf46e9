#include "fracfield/sampler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace fracfield {

double NormalStream::uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

double NormalStream::operator()() {
  ++position_;
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

NoiseFactor cholesky_mass(const SparseSymMatrix& mass) {
  if (mass.rows() != mass.cols() || mass.rows() == 0) throw std::invalid_argument("mass matrix must be square");
  Eigen::SimplicialLLT<SparseSymMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(mass);
  if (llt.info() != Eigen::Success) throw std::runtime_error("mass matrix is not symmetric positive definite");
  NoiseFactor f;
  f.lower = llt.matrixL();
  return f;
}

Eigen::VectorXd sample_noise_load(const NoiseFactor& factor, NormalStream& rng) {
  Eigen::VectorXd z(factor.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng();
  return factor.lower * z;
}

FieldRealization sample_field(const Eigen::Ref<const Eigen::VectorXd>& g_load, const NoiseFactor& factor,
                              const FractionalInverse& op, const UniformMesh& mesh, NormalStream& rng) {
  if (g_load.size() != factor.size() || op.size() != factor.size() || mesh.dof_count() != factor.size()) {
    throw std::invalid_argument("sampler components have inconsistent dimensions");
  }
  const std::uint64_t position = rng.position();
  const Eigen::VectorXd load = g_load + sample_noise_load(factor, rng);
  return {op.apply(load), mesh, rng.seed(), position};
}

double field_eval(const FieldRealization& field, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const BasisStencil st = basis_stencil(field.mesh, x);
  double v = 0.0;
  for (int i = 0; i < st.count; ++i) v += st.value[i] * field.coefficients(st.dof[i]);
  return v;
}

Eigen::VectorXd load_vector(const UniformMesh& mesh, const std::function<double(const Point&)>& g) {
  const Eigen::Index n = mesh.interior_per_dim();
  const double h = mesh.grid_spacing();
  const double gauss[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.dof_count());
  auto add = [&](Eigen::Index a, Eigen::Index b, double v) {
    if (a >= 1 && a <= n && b >= 1 && b <= n) out((a - 1) + n * (b - 1)) += v;
  };

  if (mesh.dim() == 1) {
    Point x(1);
    for (Eigen::Index a = 0; a <= n; ++a) {
      for (double s : gauss) {
        x(0) = (static_cast<double>(a) + s) * h;
        const double w = 0.5 * h * g(x);
        add(a, 1, w * (1.0 - s));
        add(a + 1, 1, w * s);
      }
    }
    return out;
  }

  // Triangle v0, v1, v2 parametrised over the unit square by
  // x = v0 + xi (v1 - v0) + xi eta (v2 - v1), Jacobian 2 |T| xi.
  Point x(2);
  for (Eigen::Index b = 0; b <= n; ++b) {
    for (Eigen::Index a = 0; a <= n; ++a) {
      for (int upper = 0; upper < 2; ++upper) {
        const Eigen::Index v[3][2] = {{a, b}, {upper ? a : a + 1, upper ? b + 1 : b}, {a + 1, b + 1}};
        for (double xi : gauss) {
          for (double eta : gauss) {
            const double l0 = 1.0 - xi, l1 = xi * (1.0 - eta), l2 = xi * eta;
            x(0) = h * (l0 * v[0][0] + l1 * v[1][0] + l2 * v[2][0]);
            x(1) = h * (l0 * v[0][1] + l1 * v[1][1] + l2 * v[2][1]);
            const double w = 0.25 * (h * h) * xi * g(x);
            add(v[0][0], v[0][1], w * l0);
            add(v[1][0], v[1][1], w * l1);
            add(v[2][0], v[2][1], w * l2);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace fracfield
