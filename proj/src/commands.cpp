#include "fracfield/commands.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "fracfield/format.hpp"
#include "fracfield/fractional.hpp"
#include "fracfield/sampler.hpp"
#include "fracfield/study_io.hpp"
#include "fracfield/weak_error.hpp"

namespace fracfield {

namespace {

const std::map<std::string, std::set<std::string>>& key_table() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"study",
       {"d", "kappa", "betas", "meshes", "calibration", "n_ok", "eval_points", "functionals", "threads",
        "memory_cap_mb", "output_dir", "prefix"}},
      {"scheme-table", {"d", "betas", "meshes", "calibration"}},
      {"sample",
       {"d", "n", "kappa", "beta", "calibration", "k", "mode", "seed", "count", "mean", "threads", "memory_cap_mb",
        "output_dir", "output"}},
      {"variance",
       {"d", "n", "kappa", "beta", "calibration", "k", "mode", "n_ok", "points", "threads", "memory_cap_mb",
        "output_dir", "output"}},
  };
  return table;
}

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

int read_dim(const ConfigMap& v) {
  const long long d = config_int(v, "d", 1);
  if (d != 1 && d != 2) throw UsageError("d must be 1 or 2");
  return static_cast<int>(d);
}

int read_threads(const ConfigMap& v) {
  const long long t = config_int(v, "threads", 1);
  if (t < 1) throw UsageError("threads must be >= 1");
  return static_cast<int>(t);
}

std::size_t read_memory_cap(const ConfigMap& v) {
  const long long mb = config_int(v, "memory_cap_mb", static_cast<long long>(kDefaultMemoryCap >> 20));
  if (mb < 1) throw UsageError("memory_cap_mb must be positive");
  return static_cast<std::size_t>(mb) << 20;
}

std::filesystem::path output_dir(const ConfigMap& v, const CommandContext& ctx) {
  return config_string(v, "output_dir", ctx.default_output_dir.empty() ? "." : ctx.default_output_dir);
}

std::string stamp(const CommandContext& ctx) { return ctx.timestamp.empty() ? utc_timestamp() : ctx.timestamp; }

std::ofstream open_artifact(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void finish_artifact(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::vector<Eigen::Index> default_table_meshes(int dim) {
  if (dim == 1) return {511, 1023, 2047, 4095};
  return {15, 31, 63, 127};
}

/// Settings shared by sample and variance: one mesh, one beta.
struct SingleCell {
  int dim;
  Eigen::Index n;
  double kappa;
  double beta;
  std::string calibration;
  std::string mode;
  double k = 0.0;  // 0 when the oracle replaces the quadrature
  Eigen::Index k_minus = 0;
  Eigen::Index k_plus = 0;
  int threads;
  std::size_t memory_cap;

  std::map<std::string, std::string> parameters() const {
    std::map<std::string, std::string> p;
    p["d"] = std::to_string(dim);
    p["n"] = std::to_string(n);
    p["N_h"] = std::to_string(dim == 1 ? n : n * n);
    p["kappa"] = format_double(kappa);
    p["beta"] = format_double(beta);
    p["mode"] = mode;
    if (mode != "oracle") {
      p["k"] = format_double(k);
      p["K_minus"] = std::to_string(k_minus);
      p["K_plus"] = std::to_string(k_plus);
    }
    p["memory_cap"] = std::to_string(memory_cap);
    return p;
  }
};

SingleCell read_single_cell(const ConfigMap& v, const std::set<std::string>& modes) {
  SingleCell c;
  c.dim = read_dim(v);
  c.n = config_int(v, "n", 63);
  if (c.n < 1) throw UsageError("n must be positive");
  c.kappa = config_double(v, "kappa", 0.5);
  if (!(c.kappa >= 0.0)) throw UsageError("kappa must be nonnegative");
  c.beta = config_double(v, "beta", 0.75);
  if (!(c.beta > 0.0 && c.beta <= 1.0)) throw UsageError("beta must lie in (0,1]");
  c.threads = read_threads(v);
  c.memory_cap = read_memory_cap(v);
  c.mode = config_string(v, "mode", "auto");
  if (c.mode != "auto" && !modes.count(c.mode)) throw UsageError("unsupported mode '" + c.mode + "'");
  if (c.beta == 1.0) {
    if (c.mode != "auto" && c.mode != "oracle") throw UsageError("beta = 1 is only available in oracle mode");
    c.mode = "oracle";
  } else if (c.mode == "auto") {
    c.mode = "dense";
  }
  c.calibration = c.mode == "oracle" ? "none (eigendecomposition)" : config_string(v, "calibration", "experiment");
  if (c.mode != "oracle") {
    const UniformMesh mesh(c.dim, c.n);
    const CalibrationStrategy strategy = CalibrationStrategy::parse(c.calibration, c.dim, c.beta);
    c.k = v.count("k") ? config_double(v, "k", 0.0) : calibrate_k(mesh.mesh_size(), c.beta, strategy);
    if (v.count("k")) c.calibration = "fixed k";
    const SincScheme scheme(c.beta, c.k);
    c.k_minus = scheme.k_minus();
    c.k_plus = scheme.k_plus();
  }
  return c;
}

Eigen::MatrixXd dense_q(const SingleCell& c, const SparseSymMatrix& m, const SparseSymMatrix& k_op) {
  if (c.mode == "oracle") {
    check_dense_budget(m.rows(), 3, c.memory_cap, "eigendecomposition oracle");
    return oracle_fractional_inverse(m, k_op, c.beta);
  }
  AssemblyOptions opts;
  opts.threads = c.threads;
  opts.memory_cap_bytes = c.memory_cap;
  return assemble_Q(m, k_op, SincScheme(c.beta, c.k), opts);
}

void print_plan(std::ostream& out, const std::map<std::string, std::string>& params) {
  out << "dry run, nothing written\n";
  for (const auto& [key, value] : params) out << "  " << key << " = " << value << '\n';
}

}  // namespace

const std::set<std::string>& command_keys(const std::string& command) {
  const auto it = key_table().find(command);
  if (it == key_table().end()) throw UsageError("unknown command '" + command + "'");
  return it->second;
}

const std::set<std::string>& command_names() {
  static const std::set<std::string> names = [] {
    std::set<std::string> out;
    for (const auto& [name, keys] : key_table()) out.insert(name);
    return out;
  }();
  return names;
}

int cmd_study(const ConfigMap& v, const CommandContext& ctx) {
  const int dim = read_dim(v);
  StudyConfig config = StudyConfig::defaults(dim);
  config.kappa = config_double(v, "kappa", config.kappa);
  config.betas = config_doubles(v, "betas", config.betas);
  config.meshes = config_ints(v, "meshes", config.meshes);
  config.calibration = config_string(v, "calibration", config.calibration);
  config.n_ok = config_int(v, "n_ok", config.n_ok);
  config.eval_points = config_int(v, "eval_points", config.eval_points);
  if (v.count("functionals")) {
    config.functionals.clear();
    for (const std::string& name : config_names(v, "functionals", {})) {
      config.functionals.push_back(Functional::parse(name));
    }
  }
  config.threads = read_threads(v);
  config.memory_cap_bytes = read_memory_cap(v);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const std::filesystem::path dir = output_dir(v, ctx);
  const std::string prefix = config_string(v, "prefix", "study_d" + std::to_string(dim));
  if (ctx.dry_run) {
    std::ostream& out = *ctx.out;
    out << "dry run, nothing written; outputs would go to " << (dir / (prefix + "_rows.csv")).string() << " and "
        << (dir / (prefix + "_rates.csv")).string() << '\n';
    out << "beta,N_h,h,k,nodes\n";
    for (const StudyCell& c : plan_study(config)) {
      out << format_double(c.beta) << ',' << c.dofs << ',' << format_double(c.h) << ',' << format_double(c.k) << ','
          << c.nodes << '\n';
    }
    return kExitOk;
  }

  const StudyResult result = run_study(config, [&](const std::string& msg) { *ctx.err << msg << '\n'; });
  for (const std::string& w : result.warnings) *ctx.err << "warning: " << w << '\n';

  ArtifactHeader header;
  header.parameters = result.provenance;
  header.calibration = config.calibration;
  header.generator = "none (deterministic)";
  const std::string when = stamp(ctx);

  const std::filesystem::path rows_path = dir / (prefix + "_rows.csv");
  const std::filesystem::path rates_path = dir / (prefix + "_rates.csv");
  {
    std::ofstream out = open_artifact(rows_path);
    header.artifact = "study rows";
    write_header(out, header, when);
    write_rows_csv(out, result);
    finish_artifact(out, rows_path);
  }
  {
    std::ofstream out = open_artifact(rates_path);
    header.artifact = "study rates";
    write_header(out, header, when);
    write_rates_csv(out, result);
    finish_artifact(out, rates_path);
  }
  if (ctx.plot) {
    for (const Functional& f : config.functionals) {
      std::string stem = f.name();
      for (char& ch : stem) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.') ch = '_';
      }
      const std::filesystem::path plot_path = dir / (prefix + "_" + stem + ".svg");
      std::ofstream out = open_artifact(plot_path);
      std::ostringstream comment;
      header.artifact = "error plot " + f.name();
      write_header(comment, header, when);
      out << "<!--\n" << comment.str() << "-->\n";
      write_error_plot_svg(out, result, f.name());
      finish_artifact(out, plot_path);
    }
  }
  for (const StudyFailure& f : result.failures) *ctx.err << "error: " << f.message << '\n';
  return result.ok() ? kExitOk : kExitFailure;
}

int cmd_scheme_table(const ConfigMap& v, const CommandContext& ctx) {
  const int dim = read_dim(v);
  const std::vector<double> betas = config_doubles(v, "betas", {0.6, 0.7, 0.8, 0.9});
  const std::vector<Eigen::Index> meshes = config_ints(v, "meshes", default_table_meshes(dim));
  const std::string calibration = config_string(v, "calibration", "experiment");
  if (betas.empty()) throw UsageError("beta list is empty");
  if (meshes.empty()) throw UsageError("mesh list is empty");
  for (double b : betas) {
    if (!(b > 0.0 && b < 1.0)) throw UsageError("every beta must lie in (0,1), got " + format_double(b));
  }
  for (Eigen::Index n : meshes) {
    if (n < 1) throw UsageError("mesh sizes must be positive");
  }

  std::ostream& out = *ctx.out;
  if (ctx.long_table) {
    out << "beta,d,N_h,h,k,K_minus,K_plus,nodes\n";
    for (double b : betas) {
      for (Eigen::Index n : meshes) {
        const UniformMesh mesh(dim, n);
        const double k = calibrate_k(mesh.mesh_size(), b, CalibrationStrategy::parse(calibration, dim, b));
        const SincScheme s(b, k);
        out << format_double(b) << ',' << dim << ',' << mesh.dof_count() << ',' << format_double(mesh.mesh_size())
            << ',' << format_double(k) << ',' << s.k_minus() << ',' << s.k_plus() << ',' << s.node_count() << '\n';
      }
    }
    return kExitOk;
  }
  out << "# quadrature nodes, d=" << dim << ", calibration " << calibration << '\n';
  out << std::setw(8) << "N_h";
  for (double b : betas) out << std::setw(8) << ("b=" + format_double(b));
  out << '\n';
  for (Eigen::Index n : meshes) {
    const UniformMesh mesh(dim, n);
    out << std::setw(8) << mesh.dof_count();
    for (double b : betas) {
      const double k = calibrate_k(mesh.mesh_size(), b, CalibrationStrategy::parse(calibration, dim, b));
      out << std::setw(8) << SincScheme(b, k).node_count();
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_sample(const ConfigMap& v, const CommandContext& ctx) {
  const SingleCell cell = read_single_cell(v, {"dense", "operator", "oracle"});
  const long long seed = config_int(v, "seed", 1);
  const long long count = config_int(v, "count", 1);
  if (seed < 0) throw UsageError("seed must be nonnegative");
  if (count < 0) throw UsageError("count must be nonnegative");
  const double mean = config_double(v, "mean", 0.0);
  const std::filesystem::path path = output_dir(v, ctx) / config_string(v, "output", "sample.csv");

  ArtifactHeader header;
  header.artifact = "sample";
  header.parameters = cell.parameters();
  header.parameters["seed"] = std::to_string(seed);
  header.parameters["count"] = std::to_string(count);
  header.parameters["mean"] = format_double(mean);
  header.calibration = cell.calibration;
  header.generator = std::string(NormalStream::name);
  if (ctx.dry_run) {
    header.parameters["output"] = path.string();
    print_plan(*ctx.out, header.parameters);
    return kExitOk;
  }

  const UniformMesh mesh(cell.dim, cell.n);
  const SparseSymMatrix m = assemble_mass(mesh);
  const SparseSymMatrix k_op = shifted_operator(m, assemble_stiffness(mesh), cell.kappa);
  std::unique_ptr<FractionalInverse> op;
  if (count > 0) {
    if (cell.mode == "operator") {
      op = std::make_unique<SincOperator>(m, k_op, SincScheme(cell.beta, cell.k), cell.threads);
    } else {
      op = std::make_unique<DenseOperator>(dense_q(cell, m, k_op), cell.mode);
    }
  }

  std::ofstream out = open_artifact(path);
  write_header(out, header, stamp(ctx));
  out << (cell.dim == 1 ? "realization,x,value\n" : "realization,x,y,value\n");
  if (count > 0) {
    const NoiseFactor g = cholesky_mass(m);
    const Eigen::VectorXd load = load_vector(mesh, [mean](const Point&) { return mean; });
    NormalStream rng(static_cast<std::uint64_t>(seed));
    std::vector<Point> nodes;
    for (Eigen::Index j = 0; j < mesh.dof_count(); ++j) nodes.push_back(mesh.node(j));
    for (long long r = 0; r < count; ++r) {
      const FieldRealization u = sample_field(load, g, *op, mesh, rng);
      for (Eigen::Index j = 0; j < mesh.dof_count(); ++j) {
        out << r << ',' << format_double(nodes[static_cast<std::size_t>(j)](0)) << ',';
        if (cell.dim == 2) out << format_double(nodes[static_cast<std::size_t>(j)](1)) << ',';
        out << format_double(u.coefficients(j)) << '\n';
      }
    }
  }
  finish_artifact(out, path);
  return kExitOk;
}

int cmd_variance(const ConfigMap& v, const CommandContext& ctx) {
  const SingleCell cell = read_single_cell(v, {"dense", "oracle"});
  const long long n_ok = config_int(v, "n_ok", 1 + (1LL << 14));
  const long long points = config_int(v, "points", 1025);
  if (n_ok < 1) throw UsageError("n_ok must be positive");
  if (points < 2) throw UsageError("points must be >= 2");
  if (!(4.0 * cell.beta > cell.dim)) throw UsageError("need 4 beta > d for a bounded variance");
  const std::filesystem::path path = output_dir(v, ctx) / config_string(v, "output", "variance.csv");

  ArtifactHeader header;
  header.artifact = "variance";
  header.parameters = cell.parameters();
  header.parameters["n_ok"] = std::to_string(n_ok);
  header.parameters["points"] = std::to_string(points);
  header.calibration = cell.calibration;
  if (ctx.dry_run) {
    header.parameters["output"] = path.string();
    print_plan(*ctx.out, header.parameters);
    return kExitOk;
  }

  const EvalGrid grid(cell.dim, points);
  const Eigen::ArrayXXd ref = reference_variance_grid(SpectralModel{cell.dim, cell.kappa, cell.beta, n_ok}, grid);
  const UniformMesh mesh(cell.dim, cell.n);
  const SparseSymMatrix m = assemble_mass(mesh);
  const SparseSymMatrix k_op = shifted_operator(m, assemble_stiffness(mesh), cell.kappa);
  Eigen::Index clamped = 0;
  const Eigen::ArrayXXd disc = discrete_variance_grid(dense_q(cell, m, k_op), m, mesh, grid, &clamped, cell.threads);
  if (clamped > 0) *ctx.err << "warning: " << clamped << " negative variances clamped to zero\n";

  std::ofstream out = open_artifact(path);
  write_header(out, header, stamp(ctx));
  out << (cell.dim == 1 ? "x,sigma2_ref,sigma2_disc\n" : "x,y,sigma2_ref,sigma2_disc\n");
  for (Eigen::Index col = 0; col < grid.cols(); ++col) {
    for (Eigen::Index row = 0; row < grid.rows(); ++row) {
      out << format_double(grid.coordinate(row)) << ',';
      if (cell.dim == 2) out << format_double(grid.coordinate(col)) << ',';
      out << format_double(ref(row, col)) << ',' << format_double(disc(row, col)) << '\n';
    }
  }
  finish_artifact(out, path);
  return kExitOk;
}

int run_command(const std::string& command, const ConfigMap& values, const CommandContext& ctx) {
  std::ostream& err = *ctx.err;
  try {
    const std::set<std::string>& keys = command_keys(command);
    for (const auto& [key, value] : values) {
      if (!keys.count(key)) throw UsageError("unknown key '" + key + "' for " + command);
    }
    if (command == "study") return cmd_study(values, ctx);
    if (command == "scheme-table") return cmd_scheme_table(values, ctx);
    if (command == "sample") return cmd_sample(values, ctx);
    return cmd_variance(values, ctx);
  } catch (const MemoryBudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    if (command == "sample") {
      err << "hint: use operator mode (--mode operator), which never forms the dense matrix\n";
    } else {
      err << "hint: raise --memory-cap-mb or use a coarser mesh\n";
    }
    return kExitFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace fracfield
