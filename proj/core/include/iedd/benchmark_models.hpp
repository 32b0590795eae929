#pragma once

#include <array>
#include <string>
#include <vector>

#include "iedd/model.hpp"

namespace iedd {

enum class BenchmarkName { TwoBlocks, FaultedVti, FaultedFormation };

BenchmarkName parse_benchmark_name(const std::string& name);
std::string to_string(BenchmarkName name);

// Analytic faulted formation: shale VTI layers around isotropic sand, with the
// exponential fluid perturbation applied inside the sand only. The shale and
// sand values are configurable defaults, not measured data.
struct FormationParams {
  double shale_sigma_h = 0.5;
  double shale_sigma_v = 0.2;
  double sand_sigma = 0.05;
  Vec3 perturbation_center{500.0, 0.0, 40.0};
  double perturbation_alpha = 4.0;
  double perturbation_gamma = 50.0;
  double fault_x = 450.0;
  // Downward offset of the sand layers on the hanging wall (x >= fault_x).
  double fault_throw = 5.0;
  // Sand layers as [bottom, top] in z on the footwall side.
  std::vector<std::array<double, 2>> sand_layers{{{30.0, 50.0}}, {{-10.0, 5.0}}};

  // Every length (including the perturbation range) multiplied by `s`.
  FormationParams scaled(double s) const;
};

class FormationSampler final : public ConductivitySampler {
 public:
  explicit FormationSampler(FormationParams params) : params_(std::move(params)) {}

  bool in_sand(const Vec3& p) const;
  Tensor3x3 sample(const Vec3& p, bool* clamped = nullptr) const override;
  const FormationParams& params() const { return params_; }

 private:
  FormationParams params_;
};

// A benchmark model together with the acquisition it was designed for. The
// frequency is rescaled by 1/scale² so that geometry / skin depth is preserved.
struct BenchmarkModel {
  BenchmarkName name;
  double scale;
  ConductivityModel model;
  double frequency;
  Vec3 source_position;
  Vec3 source_moment;
  // Suggested decomposition (sweep order = vector order).
  std::vector<IndexBox> boxes;
  // Observation points.
  std::vector<Vec3> receivers;
  // Receivers sit inside the anomalous region (tool embedded in the formation).
  bool receivers_embedded = false;
};

// scale in (0, 1]; grid counts and lengths shrink by `scale`, cell size is kept.
BenchmarkModel build_benchmark_model(BenchmarkName name, double scale,
                                     const FormationParams& formation = {});

}  // namespace iedd
