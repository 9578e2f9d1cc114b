// ckern: command-line front end for the connection heat kernel library.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ckern/ckern.hpp"

namespace {

using namespace ckern;
using io::json;

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kIo = 3,
  kSchema = 4,
  kPrecondition = 5,
  kNumeric = 6,
};

constexpr const char* kExitHelp =
    "Exit codes:\n"
    "  0  all checks passed\n"
    "  1  a reported check exceeded its tolerance\n"
    "  2  bad command-line usage\n"
    "  3  input file missing or unreadable\n"
    "  4  input does not follow the expected schema\n"
    "  5  precondition failed (invalid graph, singular M, K out of range, ...)\n"
    "  6  numerical limit reached (series or lattice sum did not converge)\n";

struct Check {
  std::string name;
  double residual;
  double tolerance;
  bool pass() const { return residual <= tolerance; }
};

struct Options {
  std::string out = "json";
  double tol = -1.0;
  std::uint64_t seed = 1;
  bool timing = false;

  double tol_or(double fallback) const { return tol > 0.0 ? tol : fallback; }
};

struct Report {
  std::string command;
  std::string digest_input;
  std::vector<Check> checks;
  json data = json::object();
  std::string csv;
};

Report make_report(const std::string& command, const std::vector<std::string>& args) {
  Report r;
  r.command = command;
  for (const auto& a : args) r.digest_input += a + '\n';
  return r;
}

void add_input_file(Report& r, const std::string& path) { r.digest_input += io::read_file(path); }

int emit(const Report& r, const Options& opt, double seconds) {
  bool ok = true;
  for (const auto& c : r.checks) ok = ok && c.pass();
  if (opt.out == "csv") {
    std::cout << r.csv;
    for (const auto& c : r.checks) {
      std::cerr << "check," << c.name << ',' << io::format_double(c.residual) << ','
                << io::format_double(c.tolerance) << ',' << (c.pass() ? "pass" : "FAIL") << '\n';
    }
    if (opt.timing) std::cerr << "seconds," << io::format_double(seconds) << '\n';
  } else {
    json doc;
    doc["command"] = r.command;
    doc["inputs_digest"] = io::fnv1a_hex(r.digest_input);
    json checks = json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
    }
    doc["checks"] = std::move(checks);
    doc["ok"] = ok;
    doc["data"] = r.data;
    if (opt.timing) doc["seconds"] = seconds;
    std::cout << doc.dump(2) << '\n';
  }
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------
// Argument helpers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "expected an integer, got '" + s + "'");
  }
}

std::vector<double> parse_doubles(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "expected numbers, got '" + p + "'");
    }
  }
  return out;
}

/// Loads a graph and rejects it with a precondition error if invalid.
io::GraphDocument load_valid_graph(const std::string& path) {
  io::GraphDocument doc = io::load_graph(path);
  const auto report = validate(doc.graph, doc.reverses);
  if (!report.ok()) throw precondition_error("invalid graph: " + report.violations.front().message);
  return doc;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const ConnectionGraph& g, const std::string& spec) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (spec == "all") {
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      for (std::size_t y = 0; y < g.vertex_count(); ++y) pairs.emplace_back(x, y);
    }
    return pairs;
  }
  for (const auto& item : split(spec, ',')) {
    const auto ends = split(item, ':');
    if (ends.size() != 2) throw CLI::ValidationError("--pairs", "expected 'all' or u:v[,u:v...]");
    const auto x = g.index_of(ends[0]);
    const auto y = g.index_of(ends[1]);
    if (!x || !y) throw precondition_error("--pairs: unknown vertex in '" + item + "'");
    pairs.emplace_back(*x, *y);
  }
  return pairs;
}

json block_json(const ConnectionGraph& g, std::size_t x, std::size_t y, const Matrix& block) {
  return {{"x", g.id(x)}, {"y", g.id(y)}, {"block", io::matrix_to_json(block)}};
}

void block_csv(std::string& csv, const std::string& x, const std::string& y, const Matrix& block) {
  for (Eigen::Index i = 0; i < block.rows(); ++i) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      csv += x + ',' + y + ',' + std::to_string(i) + ',' + std::to_string(j) + ',' + io::format_double(block(i, j)) +
             '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Torus arguments

IntMatrix parse_lattice_matrix(const std::string& text) {
  std::string flat = text;
  for (char& c : flat) {
    if (c == ';') c = ',';
  }
  std::vector<std::int64_t> entries;
  for (const auto& p : split(flat, ',')) entries.push_back(parse_int(p, "--M"));
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(entries.size()))));
  if (n == 0 || n * n != entries.size()) throw CLI::ValidationError("--M", "expected n*n comma-separated integers");
  IntMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    m(static_cast<Eigen::Index>(i / n), static_cast<Eigen::Index>(i % n)) = entries[i];
  }
  return m;
}

TorusSpec parse_torus(const std::string& m_text, const std::vector<std::string>& sigma_specs) {
  const IntMatrix m = parse_lattice_matrix(m_text);
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::optional<Matrix>> sigmas(n);
  for (const auto& s : sigma_specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--sigma", "expected i:<matrix>, got '" + s + "'");
    const std::int64_t axis = parse_int(s.substr(0, colon), "--sigma");
    if (axis < 1 || axis > static_cast<std::int64_t>(n)) {
      throw CLI::ValidationError("--sigma", "axis " + std::to_string(axis) + " outside 1.." + std::to_string(n));
    }
    sigmas[static_cast<std::size_t>(axis - 1)] = io::parse_matrix_spec(s.substr(colon + 1));
  }
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sigmas[i]) throw CLI::ValidationError("--sigma", "no connection given for axis " + std::to_string(i + 1));
    out.push_back(*sigmas[i]);
  }
  return TorusSpec(m, std::move(out));
}

IntVector parse_point(const std::string& s, std::size_t n) {
  IntVector p;
  for (const auto& c : split(s, ':')) p.push_back(parse_int(c, "--pair"));
  if (p.size() != n) throw CLI::ValidationError("--pair", "point '" + s + "' needs " + std::to_string(n) + " coordinates");
  return p;
}

json point_json(const IntVector& p) { return json(p); }

// ---------------------------------------------------------------------------
// Commands

Report cmd_validate(const std::string& path, const Options& opt) {
  Report r = make_report("validate", {path});
  add_input_file(r, path);
  const io::GraphDocument doc = io::load_graph(path);
  const auto report = validate(doc.graph, doc.reverses);
  r.csv = "kind,edge,message\n";
  json list = json::array();
  std::map<std::string, double> counts;
  for (const auto& kind : {ViolationKind::orthogonality, ViolationKind::inverse_pairing,
                           ViolationKind::weight_positivity, ViolationKind::dimension_mismatch}) {
    counts[to_string(kind)] = 0.0;
  }
  for (const auto& v : report.violations) {
    list.push_back({{"kind", to_string(v.kind)}, {"edge", v.edge}, {"message", v.message}});
    counts[to_string(v.kind)] += 1.0;
    r.csv += std::string(to_string(v.kind)) + ',' + std::to_string(v.edge) + ",\"" + v.message + "\"\n";
  }
  for (const auto& [kind, count] : counts) r.checks.push_back({kind, count, 0.0});
  r.data = {{"vertices", doc.graph.vertex_count()}, {"edges", doc.graph.edge_count()}, {"violations", list}};
  (void)opt;
  return r;
}

Report cmd_consistent(const std::string& path, const Options& opt) {
  Report r = make_report("consistent", {path});
  add_input_file(r, path);
  const auto doc = load_valid_graph(path);
  const auto report = is_consistent(doc.graph, opt.tol_or(kConsistencyTol));
  json witness = json::array();
  for (auto v : report.witness) witness.push_back(doc.graph.id(v));
  r.data = {{"consistent", report.consistent}, {"witness", witness}, {"witness_defect", report.witness_defect}};
  r.checks.push_back({"consistency", report.witness_defect, opt.tol_or(kConsistencyTol)});
  r.csv = "status,witness_defect\n";
  r.csv += std::string(report.consistent ? "consistent" : "inconsistent") + ',' +
          io::format_double(report.witness_defect) + '\n';
  return r;
}

Report cmd_laplacian(const std::string& path, bool normalized, const Options& opt) {
  Report r = make_report("laplacian", {path, normalized ? "normalized" : "combinatorial"});
  add_input_file(r, path);
  const auto doc = load_valid_graph(path);
  const Matrix l = normalized ? normalized_laplacian(doc.graph).matrix() : laplacian(doc.graph).matrix();
  r.checks.push_back({"symmetry", max_abs(l - l.transpose()), opt.tol_or(1e-12)});
  r.data = {{"normalized", normalized}, {"block_dim", doc.graph.dim()}, {"matrix", io::matrix_to_json(l)}};
  r.csv = io::matrix_to_csv(l);
  return r;
}

Report cmd_kernel(const std::string& path, double t, const std::string& pairs_spec, const Options& opt) {
  Report r = make_report("kernel", {path, io::format_double(t), pairs_spec});
  add_input_file(r, path);
  const auto doc = load_valid_graph(path);
  const ConnectionGraph& g = doc.graph;
  const BlockMatrix h = dense_kernel(g, t);
  r.csv = "x,y,row,col,value\n";
  json blocks = json::array();
  for (const auto& [x, y] : parse_pairs(g, pairs_spec)) {
    blocks.push_back(block_json(g, x, y, h.block(x, y)));
    block_csv(r.csv, g.id(x), g.id(y), h.block(x, y));
  }
  r.checks.push_back({"kernel_symmetry", max_abs(h.matrix() - h.matrix().transpose()), opt.tol_or(1e-10)});
  const auto consistency = is_consistent(g);
  if (consistency.consistent) {
    const ConsistentKernel shortcut(g, t);
    double residual = 0.0;
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      for (std::size_t y = 0; y < g.vertex_count(); ++y) {
        residual = std::max(residual, max_abs(shortcut.block(x, y).block - Matrix(h.block(x, y))));
      }
    }
    r.checks.push_back({"consistent_shortcut", residual, opt.tol_or(1e-8)});
  }
  r.data = {{"t", t}, {"consistent", consistency.consistent}, {"blocks", blocks}};
  return r;
}

Report cmd_zkernel(std::size_t dims, const std::string& sigma_spec, std::int64_t a, double t, std::int64_t x,
                   const Options& opt) {
  Report r = make_report("zkernel", {std::to_string(dims), sigma_spec, std::to_string(a), io::format_double(t),
                                     std::to_string(x)});
  const Matrix sigma = io::parse_matrix_spec(sigma_spec);
  if (static_cast<std::size_t>(sigma.rows()) != dims || sigma.cols() != sigma.rows()) {
    throw precondition_error("zkernel: sigma is " + std::to_string(sigma.rows()) + "x" + std::to_string(sigma.cols()) +
                             ", expected " + std::to_string(dims) + "x" + std::to_string(dims));
  }
  if (orthogonality_defect(sigma) > kOrthoTol) throw precondition_error("zkernel: sigma is not orthogonal");
  const auto conn = LatticeConnection1D::constant(sigma);
  const double coeff = z_series_coeff(a, t);
  const Matrix block = z_kernel_block(conn, x, a, t);
  r.checks.push_back({"series_vs_bessel", std::abs(coeff - bessel_i_scaled(a, t)), opt.tol_or(1e-12)});
  r.data = {{"x", x}, {"a", a}, {"t", t}, {"coefficient", coeff}, {"block", io::matrix_to_json(block)}};
  r.csv = "x,y,row,col,value\n";
  block_csv(r.csv, std::to_string(x), std::to_string(x + a), block);
  return r;
}

Report cmd_torus(const std::string& m_text, const std::vector<std::string>& sigmas, double t, const std::string& route,
                 const std::vector<std::string>& pair_specs, const Options& opt) {
  std::vector<std::string> echo{m_text, io::format_double(t), route};
  echo.insert(echo.end(), sigmas.begin(), sigmas.end());
  echo.insert(echo.end(), pair_specs.begin(), pair_specs.end());
  Report r = make_report("torus", echo);
  const TorusSpec spec = parse_torus(m_text, sigmas);
  std::vector<std::pair<IntVector, IntVector>> pairs;
  for (const auto& ps : pair_specs) {
    const auto ends = split(ps, ',');
    if (ends.size() != 2) throw CLI::ValidationError("--pair", "expected x,y with ':'-joined coordinates");
    pairs.emplace_back(parse_point(ends[0], spec.n()), parse_point(ends[1], spec.n()));
  }
  if (pairs.empty()) pairs.emplace_back(IntVector(spec.n(), 0), IntVector(spec.n(), 0));

  const bool lattice = route == "lattice" || route == "both";
  const bool spectral = route == "spectral" || route == "both";
  r.csv = "route,x,y,row,col,value\n";
  json blocks = json::array();
  double residual = 0.0;
  for (const auto& [x, y] : pairs) {
    json entry = {{"x", point_json(x)}, {"y", point_json(y)}};
    std::string xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xs += (i ? ":" : "") + std::to_string(x[i]);
      ys += (i ? ":" : "") + std::to_string(y[i]);
    }
    Matrix hl, hs;
    if (lattice) {
      hl = kernel_lattice_sum(spec, x, y, t);
      entry["lattice"] = io::matrix_to_json(hl);
      block_csv(r.csv, "lattice," + xs, ys, hl);
    }
    if (spectral) {
      hs = kernel_spectral(spec, x, y, t);
      entry["spectral"] = io::matrix_to_json(hs);
      block_csv(r.csv, "spectral," + xs, ys, hs);
    }
    if (lattice && spectral) residual = std::max(residual, (hl - hs).norm());
    blocks.push_back(std::move(entry));
  }
  if (lattice && spectral) r.checks.push_back({"trace_formula", residual, opt.tol_or(1e-9)});
  r.data = {{"t", t}, {"det", spec.det()}, {"fibre_dim", spec.fibre_dim()}, {"blocks", blocks}};
  return r;
}

Report cmd_trace_check(const std::string& m_text, const std::vector<std::string>& sigmas, const std::string& grid,
                       const Options& opt) {
  std::vector<std::string> echo{m_text, grid};
  echo.insert(echo.end(), sigmas.begin(), sigmas.end());
  Report r = make_report("trace-check", echo);
  const TorusSpec spec = parse_torus(m_text, sigmas);
  const double tol = opt.tol_or(1e-9);
  const IntVector origin(spec.n(), 0);
  json rows = json::array();
  r.csv = "kind,t,residual,tolerance,pass\n";
  for (double t : parse_doubles(grid, "--t-grid")) {
    const double trace = trace_formula_residual(spec, origin, origin, t);
    const double theta = theta_relation_residual(spec, t);
    for (const auto& [kind, value] : {std::pair{"trace", trace}, std::pair{"theta", theta}}) {
      r.checks.push_back({std::string(kind) + "@t=" + io::format_double(t), value, tol});
      rows.push_back({{"kind", kind}, {"t", t}, {"residual", value}});
      r.csv += std::string(kind) + ',' + io::format_double(t) + ',' + io::format_double(value) + ',' +
               io::format_double(tol) + ',' + (value <= tol ? "pass" : "FAIL") + '\n';
    }
  }
  r.data = {{"rows", rows}, {"det", spec.det()}};
  return r;
}

Report cmd_vdm(const std::string& path, double t, std::optional<std::size_t> k_opt, const std::string& pairs_spec,
               const Options& opt) {
  Report r = make_report("vdm", {path, io::format_double(t), k_opt ? std::to_string(*k_opt) : "full", pairs_spec});
  add_input_file(r, path);
  const auto doc = load_valid_graph(path);
  const ConnectionGraph& g = doc.graph;
  const std::size_t full = vdm_full_rank(g);
  const std::size_t k = k_opt.value_or(full);
  const BlockMatrix h = dense_kernel(g, t);
  const VdmEmbedding full_embedding = vdm_embed(g, t, full);
  const VdmEmbedding embedding = k == full ? full_embedding : vdm_embed(g, t, k);

  double hs_residual = 0.0, route_residual = 0.0;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    for (std::size_t y = 0; y < g.vertex_count(); ++y) {
      hs_residual = std::max(hs_residual, std::abs(full_embedding.inner(x, y) - hs_norm2(h.block(x, y))));
      route_residual =
          std::max(route_residual, std::abs(full_embedding.distance(x, y) - vdm_distance_hs(h, x, y)));
    }
  }
  json rows = json::array();
  r.csv = "x,y,distance\n";
  for (const auto& [x, y] : parse_pairs(g, pairs_spec)) {
    const double dist = k == full ? vdm_distance_hs(h, x, y) : embedding.distance(x, y);
    rows.push_back({{"x", g.id(x)}, {"y", g.id(y)}, {"distance", dist}});
    r.csv += g.id(x) + ',' + g.id(y) + ',' + io::format_double(dist) + '\n';
  }
  r.checks.push_back({"hs_identity", hs_residual, opt.tol_or(1e-10)});
  r.checks.push_back({"distance_routes", route_residual, opt.tol_or(1e-10)});
  r.data = {{"t", t}, {"K", k}, {"full_rank", full}, {"distances", rows}};
  return r;
}

Report cmd_sample_check(std::size_t count, const Options& opt) {
  Report r = make_report("sample-check", {std::to_string(opt.seed), std::to_string(count)});
  random::Rng rng(opt.seed);
  double spectrum = 0.0, shortcut = 0.0, hs = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = random::index(rng, 2, 10);
    const std::size_t d = random::index(rng, 1, 3);
    const ConnectionGraph g = random::connected_graph(rng, n, d);
    const Spectrum s = sym_eig(normalized_laplacian(g).matrix());
    spectrum = std::max({spectrum, -s.values.minCoeff(), s.values.maxCoeff() - 2.0});

    const ConnectionGraph b = random::balanced_graph(rng, n, d);
    const double t = random::uniform(rng, 0.1, 3.0);
    const BlockMatrix h = dense_kernel(b, t);
    const ConsistentKernel ck(b, t);
    const VdmEmbedding v = vdm_embed(b, t, vdm_full_rank(b));
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        shortcut = std::max(shortcut, max_abs(ck.block(x, y).block - Matrix(h.block(x, y))));
        hs = std::max(hs, std::abs(v.inner(x, y) - hs_norm2(h.block(x, y))));
      }
    }
  }
  r.checks.push_back({"spectrum_in_[0,2]", std::max(spectrum, 0.0), opt.tol_or(1e-10)});
  r.checks.push_back({"consistent_shortcut", shortcut, opt.tol_or(1e-8)});
  r.checks.push_back({"hs_identity", hs, opt.tol_or(1e-10)});
  r.data = {{"seed", opt.seed}, {"count", count}};
  r.csv = "name,residual\n";
  for (const auto& c : r.checks) r.csv += c.name + ',' + io::format_double(c.residual) + '\n';
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connection graph heat kernels, torus trace formulas and vector diffusion maps.", "ckern"};
  app.footer(kExitHelp);
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--out", opt.out, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", opt.tol, "Override the tolerance of every reported check");
  app.add_option("--seed", opt.seed, "Seed for sampling commands");
  app.add_flag("--timing", opt.timing, "Include wall-clock seconds in the output");

  std::string file, pairs = "all", route = "both", m_text, grid = "0.5,1,2,5", sigma_spec;
  std::vector<std::string> sigmas, pair_specs;
  double t = 0.0;
  bool normalized = false;
  std::int64_t a = 0, x0 = 0;
  std::size_t dims = 1, count = 20;
  std::optional<std::size_t> k_opt;

  auto* validate_cmd = app.add_subcommand("validate", "Report violated connection-graph invariants");
  validate_cmd->add_option("file", file, "Graph JSON")->required();
  auto* consistent_cmd = app.add_subcommand("consistent", "Decide consistency; print a witness cycle if any");
  consistent_cmd->add_option("file", file, "Graph JSON")->required();

  auto* laplacian_cmd = app.add_subcommand("laplacian", "Assemble the connection Laplacian");
  laplacian_cmd->add_option("file", file, "Graph JSON")->required();
  laplacian_cmd->add_flag("--normalized", normalized, "Normalized form I - D^-1/2 A D^-1/2");

  auto* kernel_cmd = app.add_subcommand("kernel", "Heat kernel blocks exp(-t N) of a graph, N the normalized Laplacian");
  kernel_cmd->add_option("file", file, "Graph JSON")->required();
  kernel_cmd->add_option("--t", t, "Diffusion time")->required()->check(CLI::NonNegativeNumber);
  kernel_cmd->add_option("--pairs", pairs, "'all' or u:v[,u:v...]");

  auto* zkernel_cmd = app.add_subcommand("zkernel", "Heat kernel block on the integer line with constant connection");
  zkernel_cmd->add_option("--dims", dims, "Connection dimension")->check(CLI::PositiveNumber);
  zkernel_cmd->add_option("--sigma", sigma_spec, "rotation:theta | identity:d | scalar:v | CSV file")->required();
  zkernel_cmd->add_option("--a", a, "Offset y - x")->required();
  zkernel_cmd->add_option("--t", t, "Diffusion time")->required()->check(CLI::NonNegativeNumber);
  zkernel_cmd->add_option("--x", x0, "Base vertex");

  const std::string sigma_help = "Axis connection i:rotation:theta | i:scalar:v | i:identity:d | i:<csv file>";
  auto* torus_cmd = app.add_subcommand("torus", "Connection torus kernel by lattice sum and/or characters");
  torus_cmd->add_option("--M", m_text, "Row-major n*n integer matrix, comma separated")->required();
  torus_cmd->add_option("--sigma", sigmas, sigma_help)->required();
  torus_cmd->add_option("--t", t, "Diffusion time")->required()->check(CLI::NonNegativeNumber);
  torus_cmd->add_option("--route", route, "Evaluation route")->check(CLI::IsMember({"lattice", "spectral", "both"}));
  torus_cmd->add_option("--pair", pair_specs, "x,y with ':'-joined coordinates (default origin,origin)");

  auto* trace_cmd = app.add_subcommand("trace-check", "Trace formula and theta relation residuals over a t grid");
  trace_cmd->add_option("--M", m_text, "Row-major n*n integer matrix, comma separated")->required();
  trace_cmd->add_option("--sigma", sigmas, sigma_help)->required();
  trace_cmd->add_option("--t-grid", grid, "Comma-separated times");
  trace_cmd->add_option("--report", opt.out, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* vdm_cmd = app.add_subcommand("vdm", "Vector diffusion distances");
  vdm_cmd->add_option("file", file, "Graph JSON")->required();
  vdm_cmd->add_option("--t", t, "Diffusion time")->required()->check(CLI::NonNegativeNumber);
  vdm_cmd->add_option("--K", k_opt, "Truncation rank (default n*d)");
  vdm_cmd->add_option("--pairs", pairs, "'all' or u:v[,u:v...]");

  auto* sample_cmd = app.add_subcommand("sample-check", "Property checks on seeded random graphs");
  sample_cmd->add_option("--count", count, "Number of random graphs")->check(CLI::PositiveNumber);

  const auto start = std::chrono::steady_clock::now();
  try {
    app.parse(argc, argv);
    Report report;
    if (*validate_cmd) report = cmd_validate(file, opt);
    else if (*consistent_cmd) report = cmd_consistent(file, opt);
    else if (*laplacian_cmd) report = cmd_laplacian(file, normalized, opt);
    else if (*kernel_cmd) report = cmd_kernel(file, t, pairs, opt);
    else if (*zkernel_cmd) report = cmd_zkernel(dims, sigma_spec, a, t, x0, opt);
    else if (*torus_cmd) report = cmd_torus(m_text, sigmas, t, route, pair_specs, opt);
    else if (*trace_cmd) report = cmd_trace_check(m_text, sigmas, grid, opt);
    else if (*vdm_cmd) report = cmd_vdm(file, t, k_opt, pairs, opt);
    else report = cmd_sample_check(count, opt);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(report, opt, seconds);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const schema_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSchema;
  } catch (const precondition_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}
