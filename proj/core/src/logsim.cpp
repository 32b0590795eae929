#include "iedd/logsim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "iedd/error.hpp"

namespace iedd {

void ToolConfig::validate() const {
  if (!(frequency > 0.0)) raise(ErrorCode::InvalidParameter, "tool frequency must be positive");
  if (!(moment > 0.0)) raise(ErrorCode::InvalidParameter, "tool moment must be positive");
  if (!(norm(transmitter_axis) > 0.0))
    raise(ErrorCode::InvalidParameter, "transmitter axis must be nonzero");
  if (receiver_offsets.empty()) raise(ErrorCode::InvalidParameter, "tool needs a receiver");
  for (std::size_t k = 0; k < receiver_offsets.size(); ++k)
    if (!(receiver_offsets[k] > 0.0) || (k > 0 && receiver_offsets[k] <= receiver_offsets[k - 1]))
      raise(ErrorCode::InvalidParameter, "receiver offsets must be positive and increasing");
}

Index3 WindowSpec::counts() const {
  Index3 n{};
  for (int a = 0; a < 3; ++a) {
    const double ratio = extent[a] / cell_size;
    n[a] = std::llround(ratio);
    if (n[a] < 1 || std::abs(ratio - static_cast<double>(n[a])) > 1e-9 * std::max(1.0, ratio))
      raise(ErrorCode::InvalidParameter, "window extent is not a whole number of cells");
  }
  return n;
}

void WindowSpec::validate() const {
  if (!(cell_size > 0.0)) raise(ErrorCode::InvalidParameter, "window cell size must be positive");
  if (!(sigma0 > 0.0)) raise(ErrorCode::InvalidParameter, "window sigma0 must be positive");
  const Index3 n = counts();
  if (boxes_along_axis < 1 || n[2] % boxes_along_axis != 0)
    raise(ErrorCode::InvalidParameter, "boxes must divide the drilling-axis cell count evenly");
}

double Trajectory::length() const { return norm(end - start); }

Vec3 Trajectory::direction() const { return (1.0 / length()) * (end - start); }

double Trajectory::dip() const { return std::acos(std::clamp(direction()[2], -1.0, 1.0)); }

double Trajectory::azimuth() const {
  const Vec3 d = direction();
  return std::atan2(d[1], d[0]);
}

void Trajectory::validate() const {
  if (!(length() > 0.0)) raise(ErrorCode::InvalidParameter, "trajectory has zero length");
  if (!(station_spacing > 0.0))
    raise(ErrorCode::InvalidParameter, "station spacing must be positive");
}

std::vector<Vec3> Trajectory::stations() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor(length() / station_spacing + 1e-9)) + 1;
  const Vec3 d = direction();
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(start + (station_spacing * static_cast<double>(k)) * d);
  return out;
}

std::array<Vec3, 3> tool_axes(double dip, double azimuth) {
  const double ca = std::cos(dip), sa = std::sin(dip);
  const double cb = std::cos(azimuth), sb = std::sin(azimuth);
  return {Vec3{ca * cb, ca * sb, -sa}, Vec3{-sb, cb, 0.0}, Vec3{sa * cb, sa * sb, ca}};
}

namespace {

Grid window_grid(const WindowSpec& window) {
  const Index3 n = window.counts();
  Vec3 origin{};
  for (int a = 0; a < 3; ++a) origin[a] = -0.5 * window.extent[a] + 0.5 * window.cell_size;
  return Grid(n, {window.cell_size, window.cell_size, window.cell_size}, origin);
}

}  // namespace

WindowModel extract_window(const ConductivitySampler& global, const Vec3& station,
                           const Trajectory& trajectory, const WindowSpec& window) {
  window.validate();
  const Grid grid = window_grid(window);
  const std::array<Vec3, 3> axes = tool_axes(trajectory.dip(), trajectory.azimuth());
  std::vector<Tensor3x3> tensors(grid.cell_count());
  std::size_t clamped = 0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Vec3 p = grid.centroid(c);
    const Vec3 g = station + p[0] * axes[0] + p[1] * axes[1] + p[2] * axes[2];
    bool was_clamped = false;
    tensors[c] = global.sample(g, &was_clamped).to_frame(axes);
    if (was_clamped) ++clamped;
  }
  return {ConductivityModel(grid, std::move(tensors), window.sigma0), axes, station, clamped};
}

std::size_t LogResult::failed_stations() const {
  return static_cast<std::size_t>(
      std::count_if(stations.begin(), stations.end(), [](const StationRecord& s) { return !s.ok; }));
}

LogResult simulate_log(const ConductivitySampler& global, const Trajectory& trajectory,
                       const ToolConfig& tool, const WindowSpec& window, const LogSimConfig& cfg,
                       std::shared_ptr<KernelRepository> kernels) {
  tool.validate();
  window.validate();
  trajectory.validate();
  if (tool.receiver_offsets.back() >= 0.5 * window.extent[2])
    raise(ErrorCode::InvalidParameter, "receivers fall outside the logging window");
  if (!kernels) kernels = std::make_shared<KernelRepository>();

  const Background bg = Background::from_frequency(window.sigma0, tool.frequency);
  DipoleSource src;
  src.position = {0.0, 0.0, 0.0};
  src.moment = (tool.moment / norm(tool.transmitter_axis)) * tool.transmitter_axis;
  src.frequency = tool.frequency;
  std::vector<Receiver> receivers;
  for (std::size_t k = 0; k < tool.receiver_offsets.size(); ++k)
    receivers.push_back({"rx" + std::to_string(k + 1), {0.0, 0.0, -tool.receiver_offsets[k]}});

  const Grid grid = window_grid(window);
  const ComplexVectorField E0 = background_E_on_grid(src, grid, bg);
  DecompositionPlan plan;
  plan.boxes = split_along_axis(grid, window.boxes_along_axis, 2);
  plan.scheme = cfg.scheme;
  plan.outer_tol = cfg.outer_tol;
  plan.max_sweeps = cfg.max_sweeps;
  plan.parallel_jacobi = cfg.parallel_jacobi;

  LogResult log{tool, {}};
  const std::vector<Vec3> stations = trajectory.stations();
  for (std::size_t s = 0; s < stations.size(); ++s) {
    StationRecord rec;
    rec.index = s;
    rec.position = stations[s];
    try {
      const WindowModel wm = extract_window(global, stations[s], trajectory, window);
      rec.clamped_cells = wm.clamped_cells;
      const DdResult r = solve_dd(wm.model, bg, plan, E0, cfg.gmres, kernels);
      rec.H = receiver_H(r.E, contrast_field(wm.model), receivers, src, bg,
                         ReceiverPlacement::Embedded);
      rec.sweeps = r.state.sweep;
      rec.gmres_iterations = r.state.total_gmres_iterations();
      rec.residual = r.state.residual;
      rec.history = r.state.history;
      rec.ok = true;
    } catch (const DdNonConvergence& e) {
      rec.error = e.what();
      rec.history = e.history();
    } catch (const Error& e) {
      rec.error = e.what();
    }
    log.stations.push_back(std::move(rec));
  }
  return log;
}

void write_log_csv(const LogResult& log, std::ostream& out) {
  static constexpr const char* kComponents[3] = {"xz", "yz", "zz"};
  out << "station,x,y,z,receiver_id,offset_m,component,real,imag,magnitude\n";
  const auto old_precision = out.precision(12);
  for (const StationRecord& s : log.stations)
    for (std::size_t r = 0; r < log.tool.receiver_offsets.size(); ++r)
      for (int p = 0; p < 3; ++p) {
        out << s.index << ',' << s.position[0] << ',' << s.position[1] << ',' << s.position[2]
            << ",rx" << r + 1 << ',' << log.tool.receiver_offsets[r] << ',' << kComponents[p]
            << ',';
        if (s.ok) {
          const cplx h = s.H[r][p];
          out << h.real() << ',' << h.imag() << ',' << std::abs(h) << '\n';
        } else {
          out << "nan,nan,nan\n";
        }
      }
  out.precision(old_precision);
}

}  // namespace iedd
