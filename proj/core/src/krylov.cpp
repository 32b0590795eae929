#include "iedd/krylov.hpp"

#include <algorithm>
#include <cmath>

#include "iedd/error.hpp"

namespace iedd {

void GmresConfig::validate() const {
  if (restart < 1) raise(ErrorCode::InvalidParameter, "GMRES restart must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) raise(ErrorCode::InvalidParameter, "GMRES tol must lie in (0, 1)");
  if (max_outer < 1) raise(ErrorCode::InvalidParameter, "GMRES max_outer must be >= 1");
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) raise(ErrorCode::Dimension, "inner product of unequal lengths");
  cplx s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

double l2_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (const cplx& v : a) s += std::norm(v);
  return std::sqrt(s);
}

namespace {

void check_finite(double v) {
  if (!std::isfinite(v)) raise(ErrorCode::Divergence, "GMRES produced non-finite values");
}

// Complex Givens rotation zeroing b in (a, b).
void make_rotation(cplx a, cplx b, double& c, cplx& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
  } else if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
  } else {
    const double r = std::hypot(na, nb);
    c = na / r;
    s = (a / na) * std::conj(b) / r;
  }
}

void apply_rotation(double c, cplx s, cplx& a, cplx& b) {
  const cplx t = c * a + s * b;
  b = -std::conj(s) * a + c * b;
  a = t;
}

// Modified Gram-Schmidt of w against basis[0..=j]; returns ‖w‖ afterwards.
double orthogonalize(std::vector<std::vector<cplx>>& basis, std::size_t j, std::vector<cplx>& w,
                     std::vector<cplx>& h) {
  for (std::size_t i = 0; i <= j; ++i) {
    const cplx hij = inner_product(basis[i], w);
    h[i] = hij;
    const std::vector<cplx>& v = basis[i];
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= hij * v[k];
  }
  return l2_norm(w);
}

}  // namespace

GmresResult gmres(const LinearMap& apply, std::span<const cplx> rhs, const GmresConfig& cfg,
                  std::span<const cplx> initial_guess) {
  cfg.validate();
  const std::size_t n = rhs.size();
  GmresResult out;
  SolveStats& st = out.stats;
  out.x.assign(n, cplx(0.0));
  bool zero_guess = true;
  if (!initial_guess.empty()) {
    if (initial_guess.size() != n) raise(ErrorCode::Dimension, "initial guess length mismatch");
    std::copy(initial_guess.begin(), initial_guess.end(), out.x.begin());
    zero_guess = std::all_of(out.x.begin(), out.x.end(), [](cplx v) { return v == cplx(0.0); });
  }

  const double bnorm = l2_norm(rhs);
  check_finite(bnorm);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), cplx(0.0));
    st.residual_history = {0.0};
    st.converged = true;
    return out;
  }

  const auto m = static_cast<std::size_t>(cfg.restart);
  std::vector<std::vector<cplx>> V(m + 1, std::vector<cplx>(n));
  std::vector<std::vector<cplx>> R(m, std::vector<cplx>(m + 1));  // columns of rotated H
  std::vector<double> cs(m);
  std::vector<cplx> sn(m), g(m + 1), w(n), y(m);

  for (int cycle = 0;; ++cycle) {
    // True residual at every cycle boundary.
    std::vector<cplx>& r = V[0];
    if (zero_guess && cycle == 0) {
      std::copy(rhs.begin(), rhs.end(), r.begin());
    } else {
      apply(out.x, r);
      for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - r[k];
    }
    const double beta = l2_norm(r);
    check_finite(beta);
    const double rel = beta / bnorm;
    if (st.residual_history.empty())
      st.residual_history.push_back(rel);
    else
      st.residual_history.back() = rel;
    if (rel <= cfg.tol) {
      st.converged = true;
      return out;
    }
    if (cycle == cfg.max_outer) return out;
    if (cycle > 0) ++st.restarts;

    for (std::size_t k = 0; k < n; ++k) r[k] /= beta;
    std::fill(g.begin(), g.end(), cplx(0.0));
    g[0] = beta;

    std::size_t steps = 0;
    for (std::size_t j = 0; j < m; ++j) {
      apply(V[j], w);
      ++st.iterations;
      const double wnorm = l2_norm(w);
      check_finite(wnorm);
      std::vector<cplx>& h = R[j];
      const double hnext = orthogonalize(V, j, w, h);
      check_finite(hnext);
      h[j + 1] = hnext;
      for (std::size_t i = 0; i < j; ++i) apply_rotation(cs[i], sn[i], h[i], h[i + 1]);
      make_rotation(h[j], h[j + 1], cs[j], sn[j]);
      apply_rotation(cs[j], sn[j], h[j], h[j + 1]);
      apply_rotation(cs[j], sn[j], g[j], g[j + 1]);
      steps = j + 1;

      const bool exhausted = hnext <= 1e-14 * wnorm;
      if (exhausted && std::abs(h[j]) <= 1e-14 * wnorm)
        raise(ErrorCode::Breakdown, "GMRES breakdown: Krylov space exhausted with nonzero residual");
      st.residual_history.push_back(std::abs(g[j + 1]) / bnorm);
      if (exhausted || st.residual_history.back() <= cfg.tol) break;
      for (std::size_t k = 0; k < n; ++k) V[j + 1][k] = w[k] / hnext;
    }

    // Back substitution on the rotated upper-triangular system.
    for (std::size_t i = steps; i-- > 0;) {
      cplx s = g[i];
      for (std::size_t k = i + 1; k < steps; ++k) s -= R[k][i] * y[k];
      y[i] = s / R[i][i];
    }
    for (std::size_t i = 0; i < steps; ++i)
      for (std::size_t k = 0; k < n; ++k) out.x[k] += y[i] * V[i][k];
    zero_guess = false;
  }
}

ArnoldiResult arnoldi(const LinearMap& apply, std::span<const cplx> v0, int steps) {
  if (steps < 1) raise(ErrorCode::InvalidParameter, "Arnoldi needs at least one step");
  const double b = l2_norm(v0);
  if (b == 0.0) raise(ErrorCode::InvalidParameter, "Arnoldi start vector is zero");
  ArnoldiResult res;
  const std::size_t n = v0.size();
  res.basis.emplace_back(v0.begin(), v0.end());
  for (cplx& v : res.basis[0]) v /= b;
  std::vector<cplx> w(n);
  for (int j = 0; j < steps; ++j) {
    apply(res.basis[j], w);
    const double wnorm = l2_norm(w);
    std::vector<cplx> h(static_cast<std::size_t>(steps) + 1, cplx(0.0));
    const double hnext = orthogonalize(res.basis, static_cast<std::size_t>(j), w, h);
    h[j + 1] = hnext;
    res.hessenberg.push_back(std::move(h));
    if (hnext <= 1e-14 * wnorm) {
      res.breakdown = true;
      break;
    }
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = w[k] / hnext;
    res.basis.push_back(std::move(v));
  }
  return res;
}

}  // namespace iedd
