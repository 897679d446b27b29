// Test-only oracles, written independently of the library code paths they
// check: quadrature element stiffness, dense Gaussian-elimination FE solve,
// closed-form bilinear interpolation, a straight-line SIMP reference, and
// finite-difference helpers.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Q4 plane-stress stiffness by 2x2 Gauss quadrature (E = 1, unit square,
// nodes CCW from the bottom-left corner, DOFs interleaved x,y).
inline std::array<std::array<double, 8>, 8> quadrature_ke(double nu) {
  const double xi_n[4] = {-1, 1, 1, -1};
  const double eta_n[4] = {-1, -1, 1, 1};
  double D[3][3] = {{1, nu, 0}, {nu, 1, 0}, {0, 0, (1 - nu) / 2}};
  for (auto& row : D)
    for (double& v : row) v /= (1 - nu * nu);

  std::array<std::array<double, 8>, 8> ke{};
  const double g = 1.0 / std::sqrt(3.0);
  for (double xi : {-g, g}) {
    for (double eta : {-g, g}) {
      double B[3][8] = {};
      for (int i = 0; i < 4; ++i) {
        // unit square physical element: dN/dx = 2 dN/dxi, detJ = 1/4
        const double dndx = 2.0 * 0.25 * xi_n[i] * (1 + eta_n[i] * eta);
        const double dndy = 2.0 * 0.25 * eta_n[i] * (1 + xi_n[i] * xi);
        B[0][2 * i] = dndx;
        B[1][2 * i + 1] = dndy;
        B[2][2 * i] = dndy;
        B[2][2 * i + 1] = dndx;
      }
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
          double acc = 0;
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) acc += B[a][r] * D[a][b] * B[b][c];
          ke[r][c] += 0.25 * acc;
        }
    }
  }
  return ke;
}

// ---------------------------------------------------------------------------
// Dense in-place Gaussian elimination with partial pivoting.
inline std::vector<double> gaussian_solve(std::vector<std::vector<double>> A,
                                          std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
    if (A[pivot][col] == 0.0) throw std::runtime_error("oracle: singular matrix");
    std::swap(A[col], A[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c) acc -= A[r][c] * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = acc / A[r][r];
  }
  return x;
}

// Small description of an FE problem for the oracles, independent of the
// library's domain types.
struct DenseProblem {
  int nelx = 1, nely = 1;
  std::vector<int> fixed_dofs;
  std::map<int, double> loads;  // global DOF -> value
  std::vector<double> rho;      // element-index order (x * nely + y)
  double E0 = 1.0, Emin = 1e-9, nu = 0.3, p = 3.0;
};

struct DenseSolution {
  std::vector<double> u;  // full DOF vector
  double compliance = 0.0;
  std::vector<double> element_energy;  // SIMP-scaled
};

// Full dense assembly (quadrature stiffness), boundary conditions applied by
// striking rows/columns, Gaussian elimination.
inline DenseSolution dense_solve(const DenseProblem& pb) {
  const int nnode = (pb.nelx + 1) * (pb.nely + 1);
  const int ndof = 2 * nnode;
  const auto ke = quadrature_ke(pb.nu);

  std::vector<std::vector<double>> K(static_cast<std::size_t>(ndof),
                                     std::vector<double>(static_cast<std::size_t>(ndof), 0.0));
  auto node = [&](int x, int y) { return x * (pb.nely + 1) + y; };
  std::vector<std::array<int, 8>> edofs;
  for (int ex = 0; ex < pb.nelx; ++ex) {
    for (int ey = 0; ey < pb.nely; ++ey) {
      const int n0 = node(ex, ey), n1 = node(ex + 1, ey), n2 = node(ex + 1, ey + 1),
                n3 = node(ex, ey + 1);
      edofs.push_back({2 * n0, 2 * n0 + 1, 2 * n1, 2 * n1 + 1, 2 * n2, 2 * n2 + 1, 2 * n3,
                       2 * n3 + 1});
    }
  }
  for (int e = 0; e < pb.nelx * pb.nely; ++e) {
    const double scale =
        pb.Emin + std::pow(pb.rho[static_cast<std::size_t>(e)], pb.p) * (pb.E0 - pb.Emin);
    const auto& dofs = edofs[static_cast<std::size_t>(e)];
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        K[static_cast<std::size_t>(dofs[a])][static_cast<std::size_t>(dofs[b])] +=
            scale * ke[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }

  std::vector<int> is_fixed(static_cast<std::size_t>(ndof), 0);
  for (int d : pb.fixed_dofs) is_fixed[static_cast<std::size_t>(d)] = 1;
  std::vector<int> free_dofs;
  for (int d = 0; d < ndof; ++d)
    if (!is_fixed[static_cast<std::size_t>(d)]) free_dofs.push_back(d);

  const int nf = static_cast<int>(free_dofs.size());
  std::vector<std::vector<double>> Kf(static_cast<std::size_t>(nf),
                                      std::vector<double>(static_cast<std::size_t>(nf), 0.0));
  std::vector<double> f(static_cast<std::size_t>(nf), 0.0);
  for (int a = 0; a < nf; ++a) {
    for (int b = 0; b < nf; ++b)
      Kf[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          K[static_cast<std::size_t>(free_dofs[a])][static_cast<std::size_t>(free_dofs[b])];
    auto it = pb.loads.find(free_dofs[static_cast<std::size_t>(a)]);
    if (it != pb.loads.end()) f[static_cast<std::size_t>(a)] = it->second;
  }

  const std::vector<double> uf = gaussian_solve(Kf, f);
  DenseSolution sol;
  sol.u.assign(static_cast<std::size_t>(ndof), 0.0);
  for (int a = 0; a < nf; ++a)
    sol.u[static_cast<std::size_t>(free_dofs[a])] = uf[static_cast<std::size_t>(a)];
  for (int a = 0; a < nf; ++a) sol.compliance += f[static_cast<std::size_t>(a)] * uf[a];

  for (int e = 0; e < pb.nelx * pb.nely; ++e) {
    const auto& dofs = edofs[static_cast<std::size_t>(e)];
    double acc = 0;
    for (int a = 0; a < 8; ++a)
      for (int b = 0; b < 8; ++b)
        acc += sol.u[static_cast<std::size_t>(dofs[a])] *
               ke[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
               sol.u[static_cast<std::size_t>(dofs[b])];
    const double scale =
        pb.Emin + std::pow(pb.rho[static_cast<std::size_t>(e)], pb.p) * (pb.E0 - pb.Emin);
    sol.element_energy.push_back(scale * acc);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Closed-form bilinear interpolation on a lattice of values v(x, y).
inline double bilinear_formula(double v00, double v10, double v01, double v11, double fx,
                               double fy) {
  return v00 + (v10 - v00) * fx + (v01 - v00) * fy + (v11 - v10 - v01 + v00) * fx * fy;
}

// ---------------------------------------------------------------------------
// Straight-line reference of the published SIMP loop (OC + sensitivity
// filter), self-contained: dense FE, all-pairs filter, bisected OC.
struct SimpTrace {
  std::vector<double> compliance;             // per iteration (pre-update state)
  std::vector<std::vector<double>> densities;  // post-update, per iteration
};

inline SimpTrace reference_simp(DenseProblem pb, double v_star, double rmin, double move,
                                int max_iters, double change_tol) {
  const int n = pb.nelx * pb.nely;
  pb.rho.assign(static_cast<std::size_t>(n), v_star);
  SimpTrace trace;
  for (int iter = 0; iter < max_iters; ++iter) {
    const DenseSolution sol = dense_solve(pb);
    trace.compliance.push_back(sol.compliance);

    // sensitivities
    std::vector<double> dc(static_cast<std::size_t>(n), 0.0);
    for (int e = 0; e < n; ++e) {
      const double scale =
          pb.Emin + std::pow(pb.rho[static_cast<std::size_t>(e)], pb.p) * (pb.E0 - pb.Emin);
      const double unit = sol.element_energy[static_cast<std::size_t>(e)] / scale;
      dc[static_cast<std::size_t>(e)] = -pb.p *
                                        std::pow(pb.rho[static_cast<std::size_t>(e)], pb.p - 1.0) *
                                        (pb.E0 - pb.Emin) * unit;
    }

    // convolution sensitivity filter, all pairs
    std::vector<double> dcf(static_cast<std::size_t>(n), 0.0);
    for (int ex = 0; ex < pb.nelx; ++ex) {
      for (int ey = 0; ey < pb.nely; ++ey) {
        const int e = ex * pb.nely + ey;
        double wsum = 0.0, acc = 0.0;
        for (int ix = 0; ix < pb.nelx; ++ix) {
          for (int iy = 0; iy < pb.nely; ++iy) {
            const double w =
                rmin - std::sqrt(double((ex - ix) * (ex - ix)) + double((ey - iy) * (ey - iy)));
            if (w <= 0.0) continue;
            const int i = ix * pb.nely + iy;
            wsum += w;
            acc += w * pb.rho[static_cast<std::size_t>(i)] * dc[static_cast<std::size_t>(i)];
          }
        }
        dcf[static_cast<std::size_t>(e)] = acc / (pb.rho[static_cast<std::size_t>(e)] * wsum);
      }
    }

    // OC update, bisect lambda until the mean density hits the target
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    double lo = 0.0, hi = 1e9;
    bool converged = false;
    for (int bi = 0; bi < 200; ++bi) {
      const double lambda = 0.5 * (lo + hi);
      double sum = 0.0;
      for (int e = 0; e < n; ++e) {
        const double rho_e = pb.rho[static_cast<std::size_t>(e)];
        const double be = -dcf[static_cast<std::size_t>(e)] / lambda;
        const double cand = rho_e * std::pow(std::max(be, 0.0), 0.5);
        double v = std::min(std::min(1.0, rho_e + move), cand);
        v = std::max(std::max(1e-3, rho_e - move), v);
        next[static_cast<std::size_t>(e)] = v;
        sum += v;
      }
      const double vol = sum / n;
      if (std::abs(vol - v_star) <= 1e-6) {
        converged = true;
        break;
      }
      if (vol > v_star)
        lo = lambda;
      else
        hi = lambda;
    }
    if (!converged) throw std::runtime_error("reference_simp: OC bisection failed");

    double change = 0.0;
    for (int e = 0; e < n; ++e)
      change = std::max(change, std::abs(next[static_cast<std::size_t>(e)] -
                                         pb.rho[static_cast<std::size_t>(e)]));
    pb.rho = next;
    trace.densities.push_back(pb.rho);
    if (change < change_tol) break;
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double delta) {
  return (f(x + delta) - f(x - delta)) / (2.0 * delta);
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace oracle
