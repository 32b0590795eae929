#pragma once

#include <span>
#include <string>
#include <vector>

#include "iedd/field.hpp"
#include "iedd/greens.hpp"
#include "iedd/model.hpp"

namespace iedd {

struct DipoleSource {
  Vec3 position{0.0, 0.0, 0.0};
  Vec3 moment{0.0, 0.0, 1.0};  // A m²
  double frequency = 24000.0;  // Hz

  void validate() const;
};

struct Receiver {
  std::string id;
  Vec3 position{0.0, 0.0, 0.0};
};

// Magnetic-dipole fields in the conducting full space:
//   E⁽⁰⁾ = iωμ₀ ∇g × m,
//   H⁽⁰⁾ = e^{ik₀R}/(4πR³)·[k₀²R²(r̂×m)×r̂ + (1 − ik₀R)(3r̂(r̂·m) − m)].
std::vector<CVec3> background_E(const DipoleSource& src, std::span<const Vec3> points,
                                const Background& bg);
std::vector<CVec3> background_H(const DipoleSource& src, std::span<const Vec3> points,
                                const Background& bg);

// E⁽⁰⁾ at cell centroids. A centroid coinciding with the source takes the
// average of the six face-neighbour centroid values.
ComplexVectorField background_E_on_grid(const DipoleSource& src, const Grid& grid,
                                        const Background& bg);

enum class ReceiverPlacement {
  // Receivers inside an anomalous cell are rejected.
  Strict,
  // Receivers may sit inside the anomaly (tool embedded in the formation); a
  // cell whose centroid coincides with the receiver contributes nothing.
  Embedded,
};

// H = H⁽⁰⁾ + Σ_cells G^H(rx − r_c)·Δσ·E·Δv by direct summation over mask cells.
std::vector<CVec3> receiver_H(const ComplexVectorField& E, const ContrastField& contrast,
                              std::span<const Receiver> receivers, const DipoleSource& src,
                              const Background& bg,
                              ReceiverPlacement placement = ReceiverPlacement::Strict);

}  // namespace iedd
