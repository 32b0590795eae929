#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "iedd/decomposition.hpp"
#include "iedd/model.hpp"
#include "iedd/sources.hpp"

namespace iedd {

struct ToolConfig {
  Vec3 transmitter_axis{0.0, 0.0, 1.0};  // tool frame
  double frequency = 24000.0;
  double moment = 1.0;
  std::vector<double> receiver_offsets{7.0, 15.0, 30.0};  // metres behind the transmitter

  void validate() const;
};

struct WindowSpec {
  Vec3 extent{32.0, 32.0, 64.0};  // tool frame, metres
  double cell_size = 0.25;
  int boxes_along_axis = 2;       // subdomains along the drilling (z') axis
  double sigma0 = 0.1;

  Index3 counts() const;
  void validate() const;
};

struct Trajectory {
  Vec3 start{0.0, 0.0, 0.0};
  Vec3 end{900.0, 0.0, 78.74};
  double station_spacing = 10.0;

  double length() const;
  Vec3 direction() const;
  double dip() const;      // angle from the z axis
  double azimuth() const;  // angle of the horizontal projection from x
  std::vector<Vec3> stations() const;
  void validate() const;
};

// Tool-frame axes (x', y', z') in global coordinates: z' along the drilling
// direction, reducing to the global axes at zero dip and azimuth.
std::array<Vec3, 3> tool_axes(double dip, double azimuth);

struct WindowModel {
  ConductivityModel model;       // tool-frame lattice centred on the station
  std::array<Vec3, 3> axes;      // tool axes in global coordinates
  Vec3 station;
  std::size_t clamped_cells = 0;
};

WindowModel extract_window(const ConductivitySampler& global, const Vec3& station,
                           const Trajectory& trajectory, const WindowSpec& window);

struct LogSimConfig {
  Scheme scheme = Scheme::GsAdaptive;
  double outer_tol = 1e-3;
  int max_sweeps = 30;
  GmresConfig gmres{};
  bool parallel_jacobi = true;
};

struct StationRecord {
  std::size_t index = 0;
  Vec3 position{};
  std::vector<CVec3> H;  // per receiver, tool frame
  int sweeps = 0;
  int gmres_iterations = 0;
  double residual = 0.0;
  bool ok = false;
  std::string error;
  std::vector<SweepRecord> history;
  std::size_t clamped_cells = 0;
};

struct LogResult {
  ToolConfig tool;
  std::vector<StationRecord> stations;

  std::size_t failed_stations() const;
};

LogResult simulate_log(const ConductivitySampler& global, const Trajectory& trajectory,
                       const ToolConfig& tool, const WindowSpec& window,
                       const LogSimConfig& cfg,
                       std::shared_ptr<KernelRepository> kernels = nullptr);

// station,x,y,z,receiver_id,offset_m,component,real,imag,magnitude
void write_log_csv(const LogResult& log, std::ostream& out);

}  // namespace iedd
