#include "scg/runcomb.hpp"

#include <stdexcept>

namespace scg::runcomb {

namespace {

void fill(int n, int i, int j, std::vector<std::vector<int>>& lam, std::vector<int>& deg,
          std::vector<WickGraph>& out) {
  if (i == n) {
    WickGraph g;
    g.lambda = lam;
    g.multiplicity = 1;
    BigInt w = BigInt(1) << n;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (lam[a][b] == 2) w /= 2;
    g.pairing_weight = w;
    out.push_back(std::move(g));
    return;
  }
  if (j >= n) {
    if (deg[i] == 2) fill(n, i + 1, i + 2, lam, deg, out);
    return;
  }
  for (int e = 0; e <= 2; ++e) {
    if (deg[i] + e > 2 || deg[j] + e > 2) break;
    lam[i][j] = lam[j][i] = e;
    deg[i] += e;
    deg[j] += e;
    fill(n, i, j + 1, lam, deg, out);
    deg[i] -= e;
    deg[j] -= e;
    lam[i][j] = lam[j][i] = 0;
  }
}

}  // namespace

std::vector<WickGraph> wick_moment_graphs(int n) {
  if (n < 2 || n > 6) throw std::invalid_argument("wick_moment_graphs: n must be in [2, 6]");
  std::vector<std::vector<int>> lam(n, std::vector<int>(n, 0));
  std::vector<int> deg(n, 0);
  std::vector<WickGraph> out;
  fill(n, 0, 1, lam, deg, out);
  return out;
}

}  // namespace scg::runcomb
