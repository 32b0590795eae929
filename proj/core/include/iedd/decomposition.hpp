#pragma once

#include <memory>
#include <string>
#include <vector>

#include "iedd/error.hpp"
#include "iedd/field.hpp"
#include "iedd/krylov.hpp"
#include "iedd/operators.hpp"

namespace iedd {

enum class Scheme { FullDomain, GsFixed, GsAdaptive, JacobiAdaptive };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);
bool is_adaptive(Scheme scheme);

using SubdomainBox = IndexBox;

struct DecompositionPlan {
  std::vector<SubdomainBox> boxes;  // Gauss-Seidel sweep order
  Scheme scheme = Scheme::GsAdaptive;
  double outer_tol = 1e-6;
  double inner_tol_fixed = 1e-6;
  int max_sweeps = 50;
  // Run the independent Jacobi sub-solves on worker threads.
  bool parallel_jacobi = true;
};

// Checks disjointness and coverage of the mask, drops boxes without any
// anomalous cell. Throws InvalidPartition / Coverage.
DecompositionPlan partition(const Grid& grid, const AnomalyMask& mask,
                            std::vector<SubdomainBox> boxes,
                            Scheme scheme = Scheme::GsAdaptive);

// `count` slabs of (nearly) equal thickness along `axis`; axis < 0 picks the
// longest grid axis.
std::vector<SubdomainBox> split_along_axis(const Grid& grid, int count, int axis = -1);

// Algorithm rule for the inner tolerance: one order of magnitude below the
// current full-domain residual.
double adaptive_inner_tol(double e_full);

struct SweepRecord {
  int sweep = 0;
  std::vector<int> gmres_iterations;  // per subdomain, plan order
  std::vector<double> inner_tol;      // per subdomain
  double full_residual = 0.0;
};

struct SweepState {
  std::vector<ComplexVectorField> fields;  // E^{(i)} on each box (mask-projected)
  // interactions[i][j] = 𝒢^{(ij)}Δσ^{(j)}E^{(j)} on box i, for the current fields.
  std::vector<std::vector<ComplexVectorField>> interactions;
  int sweep = 0;
  double initial_residual = 0.0;  // residual of E⁰
  double residual = 1.0;
  std::vector<SweepRecord> history;
  std::vector<std::string> warnings;

  int total_gmres_iterations() const;
};

// Immutable per-solve operator set: box-local system operators, inter-box
// scatter kernels and the restricted background field.
class DdOperators {
 public:
  DdOperators(const ConductivityModel& model, const Background& bg, DecompositionPlan plan,
              const ComplexVectorField& E0, GmresConfig gmres = {},
              std::shared_ptr<KernelRepository> kernels = nullptr,
              double threshold = kDefaultAnomalyThreshold);

  const DecompositionPlan& plan() const { return plan_; }
  const Grid& grid() const { return grid_; }
  std::size_t box_count() const { return plan_.boxes.size(); }
  const SystemOperator& box_operator(std::size_t i) const { return *box_ops_[i]; }
  const ComplexVectorField& background(std::size_t i) const { return E0_boxes_[i]; }
  const GmresConfig& gmres_config() const { return gmres_; }

  // 𝒢^{(ij)}Δσ^{(j)}E_j on box i (the i == j term uses the box's own kernel).
  ComplexVectorField interaction(std::size_t i, std::size_t j,
                                 const ComplexVectorField& E_j) const;

  // Full-domain relative residual over the anomalous cells of the union of
  // boxes, from the state's interaction terms.
  double full_residual(const SweepState& state) const;

  // Solve (I − 𝒢^{(ii)}Δσ^{(i)})x = rhs, warm-started from `guess`.
  GmresResult solve_box(std::size_t i, const ComplexVectorField& rhs,
                        const ComplexVectorField& guess, double tol) const;

  // Global field: E^{(i)} on anomalous box cells, E⁽⁰⁾ elsewhere.
  ComplexVectorField stitch(const SweepState& state) const;

 private:
  DecompositionPlan plan_;
  Grid grid_;
  Background bg_;
  GmresConfig gmres_;
  ComplexVectorField E0_;
  std::vector<ComplexVectorField> E0_boxes_;
  std::vector<std::unique_ptr<SystemOperator>> box_ops_;
  std::vector<std::vector<std::shared_ptr<const ScatterKernel>>> scatter_;
};

// E⁰ := E⁽⁰⁾ with interactions and the initial residual evaluated.
SweepState initialize_sweeps(const DdOperators& ops);

// One block Gauss-Seidel sweep in plan order with the given inner tolerance.
void gauss_seidel_sweep(SweepState& state, const DdOperators& ops, double inner_tol);
// One block Jacobi sweep; sub-solves only read iterate-k interactions.
void jacobi_sweep(SweepState& state, const DdOperators& ops, double inner_tol);

struct DdResult {
  ComplexVectorField E;  // total field (anomalous cells solved, others E⁽⁰⁾)
  SweepState state;
};

DdResult solve_dd(const ConductivityModel& model, const Background& bg,
                  const DecompositionPlan& plan, const ComplexVectorField& E0,
                  const GmresConfig& gmres = {},
                  std::shared_ptr<KernelRepository> kernels = nullptr);

// Thrown when an inner solve fails to reach its tolerance.
class SweepError : public Error {
 public:
  SweepError(std::size_t subdomain, SolveStats stats, const std::string& what)
      : Error(ErrorCode::NonConvergence, what), subdomain_(subdomain), stats_(std::move(stats)) {}
  std::size_t subdomain() const { return subdomain_; }
  const SolveStats& stats() const { return stats_; }

 private:
  std::size_t subdomain_;
  SolveStats stats_;
};

// Thrown when the outer iteration exhausts max_sweeps.
class DdNonConvergence : public Error {
 public:
  DdNonConvergence(std::vector<SweepRecord> history, double initial_residual,
                   const std::string& what)
      : Error(ErrorCode::NonConvergence, what),
        history_(std::move(history)),
        initial_residual_(initial_residual) {}
  const std::vector<SweepRecord>& history() const { return history_; }
  double initial_residual() const { return initial_residual_; }

 private:
  std::vector<SweepRecord> history_;
  double initial_residual_;
};

}  // namespace iedd
