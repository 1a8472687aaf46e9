#include "fracfield/weak_error.hpp"

#include <algorithm>
#include <sstream>

#include "fracfield/format.hpp"
#include "fracfield/parallel.hpp"

namespace fracfield {

SparseSymMatrix field_covariance_on_pattern(const Eigen::MatrixXd& q, const SparseSymMatrix& mass, int threads) {
  const Eigen::Index n = mass.rows();
  if (mass.cols() != n || q.rows() != n || q.cols() != n) {
    throw std::invalid_argument("Q and M dimensions are inconsistent");
  }
  SparseSymMatrix c = mass;
  c.makeCompressed();
  std::vector<Eigen::VectorXd> work(static_cast<std::size_t>(std::max(1, threads)));
  parallel_for(n, threads, [&](Eigen::Index j, int worker) {
    Eigen::VectorXd& p = work[static_cast<std::size_t>(worker)];
    p.noalias() = mass * q.col(j);
    for (SparseSymMatrix::InnerIterator it(c, j); it; ++it) it.valueRef() = q.col(it.row()).dot(p);
  });
  const SparseSymMatrix ct = c.transpose();
  SparseSymMatrix sym = 0.5 * (c + ct);
  return sym;
}

Eigen::ArrayXXd discrete_variance_grid(const Eigen::MatrixXd& q, const SparseSymMatrix& mass, const UniformMesh& mesh,
                                       const EvalGrid& grid, Eigen::Index* clamped, int threads) {
  if (mesh.dof_count() != mass.rows()) throw std::invalid_argument("mesh and mass matrix dimensions differ");
  if (grid.dim != mesh.dim()) throw std::invalid_argument("grid and mesh dimensions differ");
  const SparseSymMatrix c = field_covariance_on_pattern(q, mass, threads);

  Eigen::ArrayXXd out(grid.rows(), grid.cols());
  std::vector<Eigen::Index> negatives(static_cast<std::size_t>(grid.cols()), 0);
  parallel_for(grid.cols(), threads, [&](Eigen::Index col, int) {
    Point x(grid.dim);
    if (grid.dim == 2) x(1) = grid.coordinate(col);
    for (Eigen::Index row = 0; row < grid.rows(); ++row) {
      x(0) = grid.coordinate(row);
      const BasisStencil st = basis_stencil(mesh, x);
      double v = 0.0;
      for (int a = 0; a < st.count; ++a) {
        for (int b = 0; b < st.count; ++b) {
          v += st.value[a] * st.value[b] * c.coeff(st.dof[a], st.dof[b]);
        }
      }
      if (v < 0.0) {
        v = 0.0;
        ++negatives[static_cast<std::size_t>(col)];
      }
      out(row, col) = v;
    }
  });
  if (clamped) {
    *clamped = 0;
    for (Eigen::Index k : negatives) *clamped += k;
  }
  return out;
}

StudyConfig StudyConfig::defaults(int dim) {
  StudyConfig c;
  c.dim = dim;
  if (dim == 2) {
    c.meshes = {15, 31, 63};
    c.n_ok = 1 + (Eigen::Index{1} << 11);
  } else if (dim != 1) {
    throw std::invalid_argument("dimension must be 1 or 2");
  }
  return c;
}

void StudyConfig::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("d must be 1 or 2");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite and nonnegative");
  if (betas.empty()) throw std::invalid_argument("beta list is empty");
  for (double b : betas) {
    if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("every beta must lie in (0,1), got " + format_double(b));
    if (!(4.0 * b > dim)) {
      throw std::invalid_argument("beta = " + format_double(b) + " gives an unbounded variance (need 4 beta > d)");
    }
    CalibrationStrategy::parse(calibration, dim, b);
  }
  if (meshes.size() < 2) {
    throw std::invalid_argument("a study needs at least 2 meshes (fewer than 2 usable points for the rate fit)");
  }
  for (Eigen::Index n : meshes) {
    if (n < 1) throw std::invalid_argument("mesh sizes must be positive");
  }
  if (n_ok < 1) throw std::invalid_argument("N_ok must be positive");
  if (grid_points() < 2) throw std::invalid_argument("evaluation grid needs at least 2 points per dimension");
  if (functionals.empty()) throw std::invalid_argument("functional list is empty");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::map<std::string, std::string> StudyConfig::provenance() const {
  std::map<std::string, std::string> p;
  p["d"] = std::to_string(dim);
  p["kappa"] = format_double(kappa);
  p["betas"] = join(betas, format_double);
  p["meshes"] = join(meshes, [](Eigen::Index n) { return std::to_string(n); });
  p["calibration"] = calibration;
  p["n_ok"] = std::to_string(n_ok);
  p["eval_points"] = std::to_string(grid_points());
  p["functionals"] = join(functionals, [](const Functional& f) { return f.name(); });
  p["memory_cap"] = std::to_string(memory_cap_bytes);
  return p;
}

namespace {

StudyCell make_cell(const StudyConfig& config, double beta, Eigen::Index n) {
  const UniformMesh mesh(config.dim, n);
  const double h = mesh.mesh_size();
  const double k = calibrate_k(h, beta, CalibrationStrategy::parse(config.calibration, config.dim, beta));
  const SincScheme scheme(beta, k);
  return {beta, n, mesh.dof_count(), h, k, scheme.node_count()};
}

std::string cell_label(double beta, Eigen::Index dofs) {
  return "beta=" + format_double(beta) + " N_h=" + std::to_string(dofs);
}

}  // namespace

std::vector<StudyCell> plan_study(const StudyConfig& config) {
  config.validate();
  std::vector<StudyCell> cells;
  for (double beta : config.betas) {
    for (Eigen::Index n : config.meshes) cells.push_back(make_cell(config, beta, n));
  }
  return cells;
}

StudyResult run_study(const StudyConfig& config, const StudyProgress& progress) {
  config.validate();
  StudyResult result;
  result.provenance = config.provenance();
  auto report = [&](const std::string& msg) {
    if (progress) progress(msg);
  };

  const EvalGrid grid(config.dim, config.grid_points());
  std::vector<Eigen::Index> meshes = config.meshes;
  std::sort(meshes.begin(), meshes.end());

  for (double beta : config.betas) {
    Eigen::ArrayXXd ref;
    try {
      ref = reference_variance_grid(SpectralModel{config.dim, config.kappa, beta, config.n_ok}, grid);
    } catch (const std::exception& e) {
      result.failures.push_back({beta, 0, "beta=" + format_double(beta) + " reference: " + e.what()});
      continue;
    }
    std::vector<double> e_ref;
    for (const Functional& f : config.functionals) e_ref.push_back(reference_expectation(f, ref, grid));
    report("beta=" + format_double(beta) + ": reference ready");

    // per functional: (h, err) of the completed meshes
    std::vector<std::vector<double>> hs(config.functionals.size()), errs(config.functionals.size());
    for (Eigen::Index n : meshes) {
      StudyCell cell{};
      try {
        cell = make_cell(config, beta, n);
        const UniformMesh mesh(config.dim, n);
        const SincScheme scheme(beta, cell.k);
        const SparseSymMatrix m = assemble_mass(mesh);
        const SparseSymMatrix k_op = shifted_operator(m, assemble_stiffness(mesh), config.kappa);
        AssemblyOptions opts;
        opts.threads = config.threads;
        opts.memory_cap_bytes = config.memory_cap_bytes;
        const Eigen::MatrixXd q = assemble_Q(m, k_op, scheme, opts);
        Eigen::Index clamped = 0;
        const Eigen::ArrayXXd var = discrete_variance_grid(q, m, mesh, grid, &clamped, config.threads);
        result.clamped_points += clamped;
        if (clamped > 0) {
          result.warnings.push_back(cell_label(beta, cell.dofs) + ": " + std::to_string(clamped) +
                                    " negative variances clamped to zero");
        }
        for (std::size_t fi = 0; fi < config.functionals.size(); ++fi) {
          const double e_disc = discrete_expectation(config.functionals[fi], var, grid);
          const double err = weak_error(e_ref[fi], e_disc);
          result.rows.push_back({beta, config.dim, cell.dofs, cell.h, cell.k, scheme.k_minus(), scheme.k_plus(),
                                 config.functionals[fi].name(), e_ref[fi], e_disc, err});
          hs[fi].push_back(cell.h);
          errs[fi].push_back(err);
        }
        report(cell_label(beta, cell.dofs) + ": done (" + std::to_string(cell.nodes) + " quadrature nodes)");
      } catch (const std::exception& e) {
        const Eigen::Index dofs = cell.dofs > 0 ? cell.dofs : n;
        result.failures.push_back({beta, dofs, cell_label(beta, dofs) + ": " + e.what()});
        report(result.failures.back().message);
      }
    }

    for (std::size_t fi = 0; fi < config.functionals.size(); ++fi) {
      const std::string name = config.functionals[fi].name();
      try {
        const RateFit<double> fit = fit_rate<double>(hs[fi], errs[fi]);
        if (fit.points_dropped > 0) {
          result.warnings.push_back("beta=" + format_double(beta) + " " + name + ": " +
                                    std::to_string(fit.points_dropped) + " zero errors left out of the rate fit");
        }
        result.rates.push_back(
            {beta, config.dim, name, fit.rate, theoretical_weak_rate(beta, config.dim), fit.intercept});
      } catch (const std::exception& e) {
        result.failures.push_back({beta, 0, "beta=" + format_double(beta) + " " + name + " rate: " + e.what()});
      }
    }
  }

  return result;
}

}  // namespace fracfield
