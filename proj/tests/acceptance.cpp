// Acceptance run: one PASS/FAIL line per criterion. A criterion passes when
// its worst residual is within tolerance and it finishes inside its time
// budget. Exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "ckern/ckern.hpp"
#include "oracles.hpp"

using namespace ckern;
using std::numbers::pi;

namespace {

struct Criterion {
  int id;
  std::string title;
  double tolerance;
  double budget_seconds;
  std::function<double()> residual;
};

IntMatrix int_matrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (auto v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

Matrix reflect_rotation(double beta) {
  Matrix f(2, 2);
  f << 1, 0, 0, -1;
  return f * rotation(beta);
}

std::vector<TorusSpec> torus_specs() {
  std::vector<TorusSpec> specs;
  specs.emplace_back(int_matrix({{5}}), std::vector<Matrix>{rotation(0.3)});
  specs.emplace_back(int_matrix({{2}}), std::vector<Matrix>{rotation(0.4)});
  specs.emplace_back(int_matrix({{3, 0}, {0, 4}}), std::vector<Matrix>{rotation(0.7), reflect_rotation(1.1)});
  specs.emplace_back(int_matrix({{2, 1}, {0, 3}}), std::vector<Matrix>{rotation(0.9), Matrix::Constant(1, 1, -1.0)});
  return specs;
}

const double kTorusTimes[] = {0.5, 1.0, 2.0, 5.0};

double spectrum_bound() {
  random::Rng rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = random::index(rng, 2, 12);
    const std::size_t d = random::index(rng, 1, 4);
    const Vector mu = sym_eig(normalized_laplacian(random::connected_graph(rng, n, d)).matrix()).values;
    worst = std::max({worst, -mu.minCoeff(), mu.maxCoeff() - 2.0});
  }
  return std::max(worst, 0.0);
}

double series_vs_bessel() {
  double worst = 0.0;
  for (int a = 0; a <= 10; ++a) {
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      worst = std::max(worst, std::abs(z_series_coeff(a, t) - oracle::bessel_scaled(a, t)));
    }
  }
  return worst;
}

double truncated_line() {
  constexpr std::int64_t half = 40;
  random::Rng rng(1003);
  double worst = 0.0;
  for (int kind = 0; kind < 2; ++kind) {
    std::vector<Matrix> steps;
    if (kind == 0) {
      steps.assign(2 * half, random::orthogonal(rng, 2));
    } else {
      for (std::int64_t i = 0; i < 2 * half; ++i) steps.push_back(random::orthogonal(rng, 2));
    }
    const auto conn = kind == 0 ? LatticeConnection1D::constant(steps.front())
                                : LatticeConnection1D::windowed(-half, steps);
    for (double t : {0.5, 1.0, 2.0}) {
      const Matrix h = oracle::truncated_line_kernel(steps, half, t);
      for (std::int64_t x = -6; x <= 6; ++x) {
        for (std::int64_t a = -6; a <= 6; ++a) {
          worst = std::max(worst, max_abs(z_kernel_block(conn, x, a, t) - oracle::line_block(h, half, 2, x, x + a)));
        }
      }
    }
  }
  return worst;
}

double kronecker_factorization() {
  random::Rng rng(1004);
  double worst = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<ConnectionGraph> factors;
    const std::size_t count = trial < 3 ? 2 : 3;
    for (std::size_t i = 0; i < count; ++i) {
      factors.push_back(random::regular_graph(rng, random::index(rng, 3, 5), random::index(rng, 1, 2),
                                              random::index(rng, 0, 1) == 1));
    }
    worst = std::max(worst, check_product_factorization(factors));
  }
  return worst;
}

double consistency_routes() {
  random::Rng rng(1005);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random::balanced_graph(rng, random::index(rng, 3, 12), random::index(rng, 1, 3));
    for (double t : {0.5, 2.0}) {
      const BlockMatrix dense = dense_kernel(g, t);
      const BlockMatrix eig = eigensystem_kernel(g, t);
      const ConsistentKernel shortcut(g, t);
      worst = std::max(worst, max_abs(dense.matrix() - eig.matrix()));
      for (std::size_t x = 0; x < g.vertex_count(); ++x) {
        for (std::size_t y = 0; y < g.vertex_count(); ++y) {
          const Matrix s = shortcut.block(x, y).block;
          worst = std::max({worst, max_abs(s - Matrix(dense.block(x, y))), max_abs(s - Matrix(eig.block(x, y)))});
        }
      }
    }
  }
  return worst;
}

double quotient_sums() {
  struct Case {
    std::size_t n, shift;
    double theta;
  };
  const Case cases[] = {{6, 3, 0.5}, {8, 4, 1.2}, {12, 3, 0.8}, {12, 4, 2.1}, {12, 6, 0.3}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto g = cycle_graph(c.n, rotation(c.theta));
    const auto action = GroupAction::generated_by(c.n, {cyclic_shift(c.n, c.shift)});
    for (double t : {0.5, 1.0, 3.0}) worst = std::max(worst, quotient_kernel_sum_check(g, action, t));
  }
  return worst;
}

double trace_formula() {
  double worst = 0.0;
  for (const auto& spec : torus_specs()) {
    const CosetSet cosets(spec.m());
    for (double t : kTorusTimes) {
      for (std::size_t i = 0; i < cosets.size(); ++i) {
        for (std::size_t j = 0; j < cosets.size(); ++j) {
          worst = std::max(worst, trace_formula_residual(spec, cosets.representative(i), cosets.representative(j), t));
        }
      }
    }
  }
  return worst;
}

double cycle_reduction() {
  double worst = 0.0;
  for (std::int64_t m : {3, 5, 8}) {
    const TorusSpec spec(int_matrix({{m}}), {identity(1)});
    const std::vector<std::int64_t> origin{0};
    for (double t : {0.3, 1.0, 2.0, 5.0}) {
      double want = 0.0;
      for (std::int64_t w = 0; w < m; ++w) {
        want += std::exp(-t * (1.0 - std::cos(2.0 * pi * static_cast<double>(w) / static_cast<double>(m))));
      }
      want /= static_cast<double>(m);
      worst = std::max({worst, std::abs(kernel_lattice_sum(spec, origin, origin, t)(0, 0) - want),
                        std::abs(kernel_spectral(spec, origin, origin, t)(0, 0) - want)});
    }
  }
  return worst;
}

double theta_relation() {
  double worst = 0.0;
  for (const auto& spec : torus_specs()) {
    for (double t : kTorusTimes) worst = std::max(worst, theta_relation_residual(spec, t));
  }
  return worst;
}

double vdm_identity() {
  random::Rng rng(1010);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random::connected_graph(rng, random::index(rng, 2, 10), random::index(rng, 1, 3));
    const double t = 0.5 + random::uniform(rng, 0.0, 2.0);
    const BlockMatrix h = dense_kernel(g, t);
    const VdmEmbedding v = vdm_embed(g, t, vdm_full_rank(g));
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      for (std::size_t y = 0; y < g.vertex_count(); ++y) {
        worst = std::max({worst, std::abs(v.inner(x, y) - hs_norm2(h.block(x, y))),
                          std::abs(vdm_distance_hs(h, x, y) - v.distance(x, y))});
      }
    }
  }
  return worst;
}

double character_orthogonality() {
  double worst = 0.0;
  for (const auto& spec : torus_specs()) {
    const CharacterSet chars = enumerate_characters(spec.m());
    const std::size_t n = spec.n();
    std::vector<std::int64_t> z(n, -6);
    for (;;) {
      const double want = oracle::in_lattice(spec.m(), z) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(character_mean(chars, z) - want));
      std::size_t k = 0;
      while (k < n && ++z[k] > 6) z[k++] = -6;
      if (k == n) break;
    }
  }
  return worst;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "spectrum of normalized connection Laplacian in [0,2]", 1e-10, 30, spectrum_bound},
      {2, "line series coefficient equals scaled Bessel", 1e-12, 1, series_vs_bessel},
      {3, "line kernel vs truncated dense exponential", 1e-8, 10, truncated_line},
      {4, "Kronecker-sum factorization of products", 1e-12, 5, kronecker_factorization},
      {5, "consistent shortcut, dense and eigensystem routes", 1e-8, 60, consistency_routes},
      {6, "quotient kernel equals group sum", 1e-9, 5, quotient_sums},
      {7, "torus lattice sum vs character sum", 1e-9, 60, trace_formula},
      {8, "cycle reduction on both torus routes", 1e-10, 1, cycle_reduction},
      {9, "theta relation, Bessel form vs character sum", 1e-9, 30, theta_relation},
      {10, "VDM Hilbert-Schmidt identity and distance routes", 1e-10, 10, vdm_identity},
      {11, "character orthogonality over the dual lattice", 1e-10, 5, character_orthogonality},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    double residual = 0.0;
    std::string note;
    try {
      residual = c.residual();
    } catch (const std::exception& e) {
      residual = INFINITY;
      note = std::string(" error: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = residual <= c.tolerance && seconds < c.budget_seconds;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s  residual=%.3e tol=%.0e time=%.2fs budget=%.0fs  %s%s\n", c.id,
                pass ? "PASS" : "FAIL", residual, c.tolerance, seconds, c.budget_seconds, c.title.c_str(),
                note.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
