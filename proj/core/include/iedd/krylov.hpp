#pragma once

#include <functional>
#include <span>
#include <vector>

#include "iedd/types.hpp"

namespace iedd {

// y = A·x on raw complex storage.
using LinearMap = std::function<void(std::span<const cplx> x, std::span<cplx> y)>;

struct GmresConfig {
  int restart = 10;
  double tol = 1e-6;
  int max_outer = 100;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;  // Arnoldi steps (one operator application each)
  int restarts = 0;
  std::vector<double> residual_history;  // initial residual first
  bool converged = false;

  double final_residual() const {
    return residual_history.empty() ? 0.0 : residual_history.back();
  }
};

struct GmresResult {
  std::vector<cplx> x;
  SolveStats stats;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations. Stops when
// ‖b − A·x‖ / ‖b‖ ≤ tol; the true residual is recomputed at every restart.
// Returns the best iterate with converged = false after max_outer cycles.
GmresResult gmres(const LinearMap& apply, std::span<const cplx> rhs, const GmresConfig& cfg,
                  std::span<const cplx> initial_guess = {});

struct ArnoldiResult {
  std::vector<std::vector<cplx>> basis;        // k+1 orthonormal vectors
  std::vector<std::vector<cplx>> hessenberg;   // (k+1) x k, column-major columns
  bool breakdown = false;
};

// k steps of Arnoldi with modified Gram-Schmidt from start vector v0.
ArnoldiResult arnoldi(const LinearMap& apply, std::span<const cplx> v0, int steps);

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b);  // Σ conj(a)·b
double l2_norm(std::span<const cplx> a);

}  // namespace iedd
