#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

#include <Eigen/Core>

#include "fracfield/assembly.hpp"
#include "fracfield/fractional.hpp"
#include "fracfield/mesh.hpp"

namespace fracfield {

/// Seeded stream of independent N(0,1) variates: std::mt19937_64 (fully
/// specified by the standard, so portable bit-for-bit) feeding a Box-Muller
/// transform. Uniforms are u = (bits >> 11 + 1) * 2^-53 in (0,1]; each pair
/// (u1, u2) yields r cos(2 pi u2) then r sin(2 pi u2), r = sqrt(-2 ln u1).
class NormalStream {
 public:
  static constexpr std::string_view name = "mt19937_64/box-muller";

  explicit NormalStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  double operator()();
  std::uint64_t seed() const { return seed_; }
  /// Variates drawn so far.
  std::uint64_t position() const { return position_; }

 private:
  double uniform();

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t position_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Lower-triangular G with G G^T = M (natural ordering).
struct NoiseFactor {
  SparseSymMatrix lower;
  Eigen::Index size() const { return lower.rows(); }
};

NoiseFactor cholesky_mass(const SparseSymMatrix& mass);

/// b = G z with z drawn from `rng` in index order; b ~ N(0, M).
Eigen::VectorXd sample_noise_load(const NoiseFactor& factor, NormalStream& rng);

/// A sampled field in the nodal basis of `mesh`.
struct FieldRealization {
  Eigen::VectorXd coefficients;
  UniformMesh mesh;
  std::uint64_t seed = 0;
  std::uint64_t stream_position = 0;  // variates consumed before this draw
};

/// u = Q (g + G z).
FieldRealization sample_field(const Eigen::Ref<const Eigen::VectorXd>& g_load, const NoiseFactor& factor,
                              const FractionalInverse& op, const UniformMesh& mesh, NormalStream& rng);

/// phi_h(x)^T c.
double field_eval(const FieldRealization& field, const Eigen::Ref<const Eigen::VectorXd>& x);

/// g_j = (g, phi_j) by a 2-point Gauss rule per direction on each element
/// (collapsed onto triangles in 2D); exact for affine g.
Eigen::VectorXd load_vector(const UniformMesh& mesh, const std::function<double(const Point&)>& g);

}  // namespace fracfield
