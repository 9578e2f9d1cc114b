// Heat kernel on an 8-cycle whose edges all carry a rotation by pi/4.
//
// The rotations compose to the identity around the cycle, so the graph is
// consistent and three evaluations must agree: the dense exponential, the
// scalar kernel times the path signature, and the character sum on the
// torus Z/8Z.

#include <cstdio>
#include <numbers>
#include <vector>

#include "ckern/ckern.hpp"

int main() {
  using namespace ckern;
  const double t = 1.5;
  const Matrix sigma = rotation(std::numbers::pi / 4);

  const ConnectionGraph g = cycle_graph(8, sigma);
  const BlockMatrix dense = dense_kernel(g, t);
  const ConsistentKernel shortcut(g, t);

  IntMatrix m(1, 1);
  m << 8;
  const TorusSpec spec(m, {sigma});

  std::printf("%3s %12s %12s %12s\n", "y", "dense(0,y)", "shortcut", "torus");
  for (std::int64_t y = 0; y < 8; ++y) {
    const std::vector<std::int64_t> xs{0}, ys{y};
    const Matrix torus = kernel_spectral(spec, xs, ys, t);
    const auto yi = static_cast<std::size_t>(y);
    std::printf("%3lld %12.9f %12.9f %12.9f\n", static_cast<long long>(y), dense.block(0, yi)(0, 0),
                shortcut.block(0, yi).block(0, 0), torus(0, 0));
  }
  std::printf("consistent: %s\n", is_consistent(g).consistent ? "yes" : "no");
}
