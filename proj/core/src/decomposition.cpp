#include "iedd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

namespace iedd {

Scheme parse_scheme(const std::string& name) {
  if (name == "FullDomain" || name == "full_domain") return Scheme::FullDomain;
  if (name == "GS_Fixed" || name == "gs_fixed") return Scheme::GsFixed;
  if (name == "GS_Adaptive" || name == "gs_adaptive") return Scheme::GsAdaptive;
  if (name == "Jacobi_Adaptive" || name == "jacobi_adaptive") return Scheme::JacobiAdaptive;
  raise(ErrorCode::InvalidParameter, "unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FullDomain: return "FullDomain";
    case Scheme::GsFixed: return "GS_Fixed";
    case Scheme::GsAdaptive: return "GS_Adaptive";
    case Scheme::JacobiAdaptive: return "Jacobi_Adaptive";
  }
  return "unknown";
}

bool is_adaptive(Scheme scheme) {
  return scheme == Scheme::GsAdaptive || scheme == Scheme::JacobiAdaptive;
}

DecompositionPlan partition(const Grid& grid, const AnomalyMask& mask,
                            std::vector<SubdomainBox> boxes, Scheme scheme) {
  if (mask.size() != grid.cell_count()) raise(ErrorCode::Dimension, "mask does not match grid");
  const IndexBox all = grid.full_box();
  for (const SubdomainBox& b : boxes) {
    bool inside = !b.empty();
    for (int a = 0; a < 3 && inside; ++a) inside = b.lo[a] >= 0 && b.hi[a] <= all.hi[a];
    if (!inside)
      raise(ErrorCode::InvalidPartition, "box " + b.to_string() + " is empty or outside the grid");
  }
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (boxes[i].overlaps(boxes[j]))
        raise(ErrorCode::InvalidPartition,
              "boxes " + boxes[i].to_string() + " and " + boxes[j].to_string() + " overlap");

  std::vector<std::size_t> hits(boxes.size(), 0);
  for (std::size_t c = 0; c < mask.size(); ++c) {
    if (!mask[c]) continue;
    const Index3 ijk = grid.unravel(c);
    bool covered = false;
    for (std::size_t b = 0; b < boxes.size() && !covered; ++b)
      if (boxes[b].contains(ijk)) {
        ++hits[b];
        covered = true;
      }
    if (!covered) {
      std::ostringstream os;
      os << "anomalous cell (" << ijk[0] << "," << ijk[1] << "," << ijk[2]
         << ") is not covered by any box";
      raise(ErrorCode::Coverage, os.str());
    }
  }

  DecompositionPlan plan;
  plan.scheme = scheme;
  for (std::size_t b = 0; b < boxes.size(); ++b)
    if (hits[b] > 0) plan.boxes.push_back(boxes[b]);
  return plan;
}

std::vector<SubdomainBox> split_along_axis(const Grid& grid, int count, int axis) {
  if (axis < 0) {
    axis = 0;
    for (int a = 1; a < 3; ++a)
      if (grid.n(a) >= grid.n(axis)) axis = a;
  }
  if (axis > 2) raise(ErrorCode::InvalidParameter, "axis must be 0, 1 or 2");
  const std::int64_t n = grid.n(axis);
  if (count < 1 || count > n)
    raise(ErrorCode::InvalidParameter, "cannot split the grid into that many slabs");
  std::vector<SubdomainBox> out;
  std::int64_t start = 0;
  for (int s = 0; s < count; ++s) {
    const std::int64_t width = n / count + (s < n % count ? 1 : 0);
    SubdomainBox b = grid.full_box();
    b.lo[axis] = start;
    b.hi[axis] = start + width;
    start += width;
    out.push_back(b);
  }
  return out;
}

double adaptive_inner_tol(double e_full) {
  if (!(e_full > 0.0)) raise(ErrorCode::InvalidParameter, "residual must be positive");
  return e_full / 10.0;
}

int SweepState::total_gmres_iterations() const {
  int total = 0;
  for (const SweepRecord& r : history)
    total = std::accumulate(r.gmres_iterations.begin(), r.gmres_iterations.end(), total);
  return total;
}

// ------------------------------------------------------------- DdOperators

namespace {

ContrastField restrict_contrast(const Grid& grid, const ContrastField& global, const IndexBox& box) {
  ContrastField out;
  out.contrast.reserve(box.cell_count());
  std::vector<bool> flags;
  flags.reserve(box.cell_count());
  for (std::int64_t k = box.lo[2]; k < box.hi[2]; ++k)
    for (std::int64_t j = box.lo[1]; j < box.hi[1]; ++j)
      for (std::int64_t i = box.lo[0]; i < box.hi[0]; ++i) {
        const std::size_t c = grid.linear(i, j, k);
        out.contrast.push_back(global.contrast[c]);
        flags.push_back(global.mask[c]);
      }
  out.mask = AnomalyMask(std::move(flags));
  return out;
}

}  // namespace

DdOperators::DdOperators(const ConductivityModel& model, const Background& bg,
                         DecompositionPlan plan, const ComplexVectorField& E0, GmresConfig gmres,
                         std::shared_ptr<KernelRepository> kernels, double threshold)
    : plan_(std::move(plan)), grid_(model.grid()), bg_(bg), gmres_(gmres), E0_(E0) {
  gmres_.validate();
  if (!E0.grid().same_lattice(grid_)) raise(ErrorCode::Dimension, "E0 is not on the model grid");
  if (!kernels) kernels = std::make_shared<KernelRepository>();
  const ContrastField contrast = contrast_field(model, threshold);
  const DecompositionPlan checked = partition(grid_, contrast.mask, plan_.boxes, plan_.scheme);
  plan_.boxes = checked.boxes;

  const std::size_t M = plan_.boxes.size();
  for (const IndexBox& b : plan_.boxes) {
    E0_boxes_.push_back(E0.restrict_to(b));
    box_ops_.push_back(std::make_unique<SystemOperator>(
        kernels->electric(b.extents(), grid_.spacing(), bg_), grid_.sub_grid(b),
        restrict_contrast(grid_, contrast, b)));
  }
  scatter_.assign(M, std::vector<std::shared_ptr<const ScatterKernel>>(M));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j) scatter_[i][j] = kernels->scatter(grid_, plan_.boxes[i], plan_.boxes[j], bg_);
}

ComplexVectorField DdOperators::interaction(std::size_t i, std::size_t j,
                                            const ComplexVectorField& E_j) const {
  if (i == j) return box_ops_[i]->scattered(E_j);
  const SystemOperator& src = *box_ops_[j];
  return cross_domain_scatter(*scatter_[i][j], src.contrast().contrast, src.mask(), E_j,
                              box_ops_[i]->grid());
}

double DdOperators::full_residual(const SweepState& state) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < box_count(); ++i) {
    const AnomalyMask& mask = box_ops_[i]->mask();
    const ComplexVectorField& E = state.fields[i];
    const ComplexVectorField& e0 = E0_boxes_[i];
    for (std::size_t c = 0; c < mask.size(); ++c) {
      if (!mask[c]) continue;
      for (int p = 0; p < 3; ++p) {
        cplx r = e0.at(c, p) - E.at(c, p);
        for (std::size_t j = 0; j < box_count(); ++j) r += state.interactions[i][j].at(c, p);
        num += std::norm(r);
        den += std::norm(e0.at(c, p));
      }
    }
  }
  if (den == 0.0) raise(ErrorCode::UndefinedResidual, "relative residual undefined: |E0| = 0");
  return std::sqrt(num / den);
}

GmresResult DdOperators::solve_box(std::size_t i, const ComplexVectorField& rhs,
                                   const ComplexVectorField& guess, double tol) const {
  const SystemOperator& op = *box_ops_[i];
  GmresConfig cfg = gmres_;
  cfg.tol = tol;
  std::vector<cplx> b(rhs.values().begin(), rhs.values().end());
  op.project(b);
  const LinearMap A = [&op](std::span<const cplx> x, std::span<cplx> y) { op.apply_masked(x, y); };
  return gmres(A, b, cfg, guess.values());
}

ComplexVectorField DdOperators::stitch(const SweepState& state) const {
  ComplexVectorField E = E0_;
  for (std::size_t i = 0; i < box_count(); ++i) {
    ComplexVectorField part = E0_boxes_[i];
    const AnomalyMask& mask = box_ops_[i]->mask();
    for (std::size_t c = 0; c < mask.size(); ++c)
      if (mask[c]) part.set(c, state.fields[i].vec(c));
    E.assign_box(plan_.boxes[i], part);
  }
  return E;
}

// ------------------------------------------------------------------ sweeps

namespace {

void refresh_column(SweepState& state, const DdOperators& ops, std::size_t j) {
  for (std::size_t l = 0; l < ops.box_count(); ++l)
    state.interactions[l][j] = ops.interaction(l, j, state.fields[j]);
}

ComplexVectorField box_rhs(const SweepState& state, const DdOperators& ops, std::size_t i) {
  ComplexVectorField rhs = ops.background(i);
  for (std::size_t j = 0; j < ops.box_count(); ++j)
    if (j != i) rhs += state.interactions[i][j];
  return rhs;
}

void check_inner(const GmresResult& r, std::size_t i, double tol) {
  if (r.stats.converged) return;
  std::ostringstream os;
  os << "GMRES in sub-domain " << i << " stopped at relative residual " << r.stats.final_residual()
     << " above tolerance " << tol;
  throw SweepError(i, r.stats, os.str());
}

void close_sweep(SweepState& state, const DdOperators& ops, SweepRecord record) {
  const double previous = state.residual;
  state.residual = ops.full_residual(state);
  ++state.sweep;
  record.sweep = state.sweep;
  record.full_residual = state.residual;
  state.history.push_back(std::move(record));
  if (state.residual > previous) {
    std::ostringstream os;
    os << "full-domain residual increased in sweep " << state.sweep << " (" << previous << " -> "
       << state.residual << ")";
    state.warnings.push_back(os.str());
  }
}

}  // namespace

SweepState initialize_sweeps(const DdOperators& ops) {
  const std::size_t M = ops.box_count();
  SweepState state;
  for (std::size_t i = 0; i < M; ++i) {
    ComplexVectorField E = ops.background(i);
    ops.box_operator(i).project(E.values());
    state.fields.push_back(std::move(E));
  }
  state.interactions.assign(M, std::vector<ComplexVectorField>(M));
  for (std::size_t j = 0; j < M; ++j) refresh_column(state, ops, j);
  state.residual = M > 0 ? ops.full_residual(state) : 0.0;
  state.initial_residual = state.residual;
  return state;
}

void gauss_seidel_sweep(SweepState& state, const DdOperators& ops, double inner_tol) {
  SweepRecord record;
  for (std::size_t i = 0; i < ops.box_count(); ++i) {
    const ComplexVectorField rhs = box_rhs(state, ops, i);
    GmresResult r = ops.solve_box(i, rhs, state.fields[i], inner_tol);
    check_inner(r, i, inner_tol);
    record.gmres_iterations.push_back(r.stats.iterations);
    record.inner_tol.push_back(inner_tol);
    state.fields[i] = ComplexVectorField(state.fields[i].grid(), std::move(r.x));
    refresh_column(state, ops, i);
  }
  close_sweep(state, ops, std::move(record));
}

void jacobi_sweep(SweepState& state, const DdOperators& ops, double inner_tol) {
  const std::size_t M = ops.box_count();
  auto solve = [&](std::size_t i) {
    return ops.solve_box(i, box_rhs(state, ops, i), state.fields[i], inner_tol);
  };
  std::vector<GmresResult> results;
  if (ops.plan().parallel_jacobi && M > 1) {
    std::vector<std::future<GmresResult>> jobs;
    for (std::size_t i = 0; i < M; ++i) jobs.push_back(std::async(std::launch::async, solve, i));
    for (auto& j : jobs) results.push_back(j.get());
  } else {
    for (std::size_t i = 0; i < M; ++i) results.push_back(solve(i));
  }
  SweepRecord record;
  for (std::size_t i = 0; i < M; ++i) {
    check_inner(results[i], i, inner_tol);
    record.gmres_iterations.push_back(results[i].stats.iterations);
    record.inner_tol.push_back(inner_tol);
    state.fields[i] = ComplexVectorField(state.fields[i].grid(), std::move(results[i].x));
  }
  for (std::size_t j = 0; j < M; ++j) refresh_column(state, ops, j);
  close_sweep(state, ops, std::move(record));
}

// ---------------------------------------------------------------- solve_dd

namespace {

DdResult solve_full_domain(const ConductivityModel& model, const Background& bg,
                           const DecompositionPlan& plan, const ComplexVectorField& E0,
                           const GmresConfig& gmres_cfg, KernelRepository& kernels) {
  const Grid& grid = model.grid();
  const SystemOperator op(kernels.electric(grid.counts(), grid.spacing(), bg), grid,
                          contrast_field(model));
  DdResult out{E0, {}};
  SweepState& state = out.state;
  if (!op.mask().any()) {
    state.residual = relative_residual(op, E0, E0);
    state.fields = {E0};
    return out;
  }
  state.initial_residual = relative_residual(op, E0, E0);
  GmresConfig cfg = gmres_cfg;
  cfg.tol = plan.outer_tol;
  std::vector<cplx> b(E0.values().begin(), E0.values().end());
  op.project(b);
  const LinearMap A = [&op](std::span<const cplx> x, std::span<cplx> y) { op.apply_masked(x, y); };
  GmresResult r = gmres(A, b, cfg, b);
  ComplexVectorField E(grid, std::move(r.x));
  for (std::size_t c = 0; c < grid.cell_count(); ++c)
    if (!op.mask()[c]) E.set(c, E0.vec(c));
  state.residual = relative_residual(op, E, E0);
  state.sweep = 1;
  state.history.push_back({1, {r.stats.iterations}, {cfg.tol}, state.residual});
  state.fields = {E};
  out.E = std::move(E);
  if (!r.stats.converged) {
    std::ostringstream os;
    os << "full-domain GMRES stopped at relative residual " << r.stats.final_residual();
    throw DdNonConvergence(state.history, state.initial_residual, os.str());
  }
  return out;
}

}  // namespace

DdResult solve_dd(const ConductivityModel& model, const Background& bg,
                  const DecompositionPlan& plan, const ComplexVectorField& E0,
                  const GmresConfig& gmres_cfg, std::shared_ptr<KernelRepository> kernels) {
  if (!(plan.outer_tol > 0.0 && plan.outer_tol < 1.0))
    raise(ErrorCode::InvalidParameter, "outer tolerance must lie in (0, 1)");
  if (plan.max_sweeps < 1) raise(ErrorCode::InvalidParameter, "max_sweeps must be >= 1");
  if (!kernels) kernels = std::make_shared<KernelRepository>();
  if (plan.scheme == Scheme::FullDomain)
    return solve_full_domain(model, bg, plan, E0, gmres_cfg, *kernels);

  const DdOperators ops(model, bg, plan, E0, gmres_cfg, kernels);
  SweepState state = initialize_sweeps(ops);
  if (ops.box_count() == 0) return {E0, std::move(state)};

  const double floor = plan.outer_tol / 10.0;
  while (state.residual > plan.outer_tol) {
    if (state.sweep >= plan.max_sweeps) {
      std::ostringstream os;
      os << "no convergence after " << state.sweep << " sweeps (residual " << state.residual
         << ")";
      throw DdNonConvergence(state.history, state.initial_residual, os.str());
    }
    const double tol = is_adaptive(plan.scheme)
                           ? std::max(adaptive_inner_tol(state.residual), floor)
                           : plan.inner_tol_fixed;
    if (plan.scheme == Scheme::JacobiAdaptive)
      jacobi_sweep(state, ops, tol);
    else
      gauss_seidel_sweep(state, ops, tol);
  }
  ComplexVectorField E = ops.stitch(state);
  return {std::move(E), std::move(state)};
}

}  // namespace iedd
