#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "iedd/benchmark_models.hpp"
#include "iedd/error.hpp"
#include "iedd/logsim.hpp"

using namespace iedd;

namespace {

constexpr double kPi = std::numbers::pi;

class FunctionSampler final : public ConductivitySampler {
 public:
  explicit FunctionSampler(std::function<Tensor3x3(const Vec3&)> f) : f_(std::move(f)) {}
  Tensor3x3 sample(const Vec3& p, bool* clamped) const override {
    if (clamped) *clamped = false;
    return f_(p);
  }

 private:
  std::function<Tensor3x3(const Vec3&)> f_;
};

WindowSpec small_window() {
  WindowSpec w;
  w.extent = {4.0, 4.0, 8.0};
  w.cell_size = 0.5;
  w.boxes_along_axis = 2;
  return w;
}

ToolConfig small_tool() {
  ToolConfig t;
  t.receiver_offsets = {1.0, 2.0, 3.0};
  return t;
}

void expect_error(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Trajectory, PaperGeometry) {
  const Trajectory t;
  EXPECT_NEAR(t.dip() * 180.0 / kPi, 85.0, 0.01);
  EXPECT_NEAR(t.azimuth(), 0.0, 1e-15);
  const auto s = t.stations();
  EXPECT_EQ(s.size(), static_cast<std::size_t>(std::floor(t.length() / 10.0)) + 1);
  const Vec3 d = t.direction();
  for (const Vec3& p : s) {
    const Vec3 r = p - t.start;
    EXPECT_LT(norm(cross(r, d)), 1e-9);
    EXPECT_LE(norm(r), t.length() + 1e-9);
  }
  Trajectory one;
  one.end = {3.0, 0.0, 0.0};
  one.station_spacing = 10.0;
  EXPECT_EQ(one.stations().size(), 1u);
  one.station_spacing = 0.0;
  expect_error(ErrorCode::InvalidParameter, [&] { one.stations(); });
}

TEST(ToolAxes, IdentityAtZeroAndOrthonormal) {
  const auto id = tool_axes(0.0, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(id[a][b], a == b ? 1.0 : 0.0, 1e-15);
  const Trajectory t;
  const auto ax = tool_axes(t.dip(), t.azimuth());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(dot(ax[a], ax[b]), a == b ? 1.0 : 0.0, 1e-15);
  EXPECT_LT(norm(ax[2] - t.direction()), 1e-12);
  EXPECT_NEAR(dot(cross(ax[0], ax[1]), ax[2]), 1.0, 1e-15);
}

TEST(Window, ValidationRules) {
  WindowSpec w = small_window();
  w.extent[0] = 4.2;
  expect_error(ErrorCode::InvalidParameter, [&] { w.validate(); });
  w = small_window();
  w.boxes_along_axis = 3;
  expect_error(ErrorCode::InvalidParameter, [&] { w.validate(); });
  ToolConfig tool = small_tool();
  tool.receiver_offsets = {2.0, 1.0};
  expect_error(ErrorCode::InvalidParameter, [&] { tool.validate(); });
  EXPECT_EQ(WindowSpec{}.counts(), (Index3{128, 128, 256}));
}

TEST(Window, ZeroDipIsPureCrop) {
  const Grid global({20, 20, 20}, {0.5, 0.5, 0.5}, {-4.75, -4.75, -4.75});
  std::vector<Tensor3x3> t(global.cell_count());
  for (std::size_t c = 0; c < t.size(); ++c) t[c] = Tensor3x3{{0.1 + 0.001 * c, 0.2, 0.3, 0.01, 0.02, 0.03}};
  const ConductivityModel gm(global, t, 0.1);
  Trajectory traj;
  traj.start = {0.0, 0.0, 0.0};
  traj.end = {0.0, 0.0, 1.0};
  const WindowModel w = extract_window(gm, {0.5, -1.0, 0.0}, traj, small_window());
  EXPECT_EQ(w.clamped_cells, 0u);
  const Grid& lg = w.model.grid();
  for (std::size_t c = 0; c < lg.cell_count(); ++c) {
    const Vec3 p = lg.centroid(c) + Vec3{0.5, -1.0, 0.0};
    EXPECT_EQ(w.model.tensor(c).v, gm.sample(p).v);
  }
}

TEST(Window, ClampsOutsideGlobalModel) {
  const Grid global({4, 4, 4}, {0.5, 0.5, 0.5});
  const ConductivityModel gm(global, 0.1);
  const WindowModel w = extract_window(gm, {0, 0, 0}, Trajectory{}, small_window());
  EXPECT_GT(w.clamped_cells, 0u);
}

TEST(Window, DippingToolRotatesTensors) {
  const Trajectory traj;
  const double dip = traj.dip();
  const FormationParams fp;
  const FormationSampler formation(fp);
  // Station in shale, away from the sand layers.
  const WindowModel w = extract_window(formation, {-200.0, 0.0, 100.0}, traj, small_window());
  const Tensor3x3 expected = rotate_vti_tensor(fp.shale_sigma_h, fp.shale_sigma_v, -dip, 0.0);
  // Explicit rotation-matrix oracle: Qᵀ·diag(h,h,v)·Q with Q = R_z(φ)R_y(θ).
  Eigen::Matrix3d Ry, Rz;
  Ry << std::cos(dip), 0, std::sin(dip), 0, 1, 0, -std::sin(dip), 0, std::cos(dip);
  Rz.setIdentity();
  const Eigen::Matrix3d Q = Rz * Ry;
  const Eigen::Matrix3d ref =
      Q.transpose() * Eigen::Vector3d(fp.shale_sigma_h, fp.shale_sigma_h, fp.shale_sigma_v).asDiagonal() * Q;
  for (std::size_t c = 0; c < w.model.grid().cell_count(); c += 37) {
    const Tensor3x3& t = w.model.tensor(c);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        EXPECT_NEAR(t(p, q), ref(p, q), 1e-12);
        EXPECT_NEAR(t(p, q), expected(p, q), 1e-12);
      }
    const Tensor3x3 back = t.from_frame(w.axes);
    EXPECT_NEAR(back.xx(), fp.shale_sigma_h, 1e-12);
    EXPECT_NEAR(back.zz(), fp.shale_sigma_v, 1e-12);
    EXPECT_NEAR(back.xz(), 0.0, 1e-12);
  }
  // Isotropic sand stays isotropic.
  const FunctionSampler iso([](const Vec3&) { return Tensor3x3::isotropic(0.05); });
  const WindowModel wi = extract_window(iso, {0, 0, 0}, traj, small_window());
  for (std::size_t c = 0; c < wi.model.grid().cell_count(); c += 41) {
    const Tensor3x3& t = wi.model.tensor(c);
    EXPECT_NEAR(t.xx(), 0.05, 1e-15);
    EXPECT_NEAR(t.zz(), 0.05, 1e-15);
    EXPECT_NEAR(t.xz(), 0.0, 1e-15);
  }
}

TEST(SimulateLog, HomogeneousModelGivesBackgroundValues) {
  const FunctionSampler bg([](const Vec3&) { return Tensor3x3::isotropic(0.1); });
  Trajectory traj;
  traj.end = {30.0, 0.0, 2.6};
  const ToolConfig tool = small_tool();
  const LogResult log = simulate_log(bg, traj, tool, small_window(), {});
  ASSERT_EQ(log.stations.size(), 4u);
  const Background b = Background::from_frequency(0.1, tool.frequency);
  const DipoleSource src{{0, 0, 0}, {0, 0, tool.moment}, tool.frequency};
  for (const StationRecord& s : log.stations) {
    ASSERT_TRUE(s.ok) << s.error;
    EXPECT_EQ(s.sweeps, 0);
    for (std::size_t r = 0; r < tool.receiver_offsets.size(); ++r) {
      const auto H0 = background_H(src, std::vector<Vec3>{{0, 0, -tool.receiver_offsets[r]}}, b);
      EXPECT_LE(std::abs(s.H[r][2] - H0[0][2]), 1e-12 * std::abs(H0[0][2]));
    }
  }
}

TEST(SimulateLog, MirrorSymmetricStations) {
  // Slab conductive anomaly symmetric about x = 0; vertical wells at x = ±1.
  const FunctionSampler model([](const Vec3& p) {
    return std::abs(p[2]) < 1.0 ? Tensor3x3::diagonal(0.5, 0.5, 0.2) : Tensor3x3::isotropic(0.1);
  });
  LogSimConfig cfg;
  cfg.outer_tol = 1e-6;
  auto run = [&](double x) {
    Trajectory traj;
    traj.start = {x, 0.0, 0.5};
    traj.end = {x, 0.0, 1.5};
    traj.station_spacing = 1.0;
    return simulate_log(model, traj, small_tool(), small_window(), cfg);
  };
  const LogResult a = run(1.0), b = run(-1.0);
  ASSERT_EQ(a.stations.size(), b.stations.size());
  for (std::size_t s = 0; s < a.stations.size(); ++s) {
    ASSERT_TRUE(a.stations[s].ok && b.stations[s].ok);
    EXPECT_GT(a.stations[s].sweeps, 0);
    for (std::size_t r = 0; r < 3; ++r)
      EXPECT_NEAR(std::abs(a.stations[s].H[r][2]), std::abs(b.stations[s].H[r][2]),
                  1e-9 * std::abs(a.stations[s].H[r][2]));
  }
}

TEST(SimulateLog, FailedStationsAreRecordedAndCsvStaysRectangular) {
  const FunctionSampler model([](const Vec3& p) {
    return p[0] > 5.0 ? Tensor3x3::isotropic(2.0) : Tensor3x3::isotropic(0.1);
  });
  Trajectory traj;
  traj.start = {0.0, 0.0, 0.0};
  traj.end = {10.0, 0.0, 0.0};
  traj.station_spacing = 5.0;
  LogSimConfig cfg;
  cfg.outer_tol = 1e-12;
  cfg.max_sweeps = 1;
  const LogResult log = simulate_log(model, traj, small_tool(), small_window(), cfg);
  ASSERT_EQ(log.stations.size(), 3u);
  EXPECT_TRUE(log.stations[0].ok);  // homogeneous window
  EXPECT_GE(log.failed_stations(), 1u);
  for (const StationRecord& s : log.stations)
    if (!s.ok) EXPECT_FALSE(s.error.empty());

  std::ostringstream os;
  write_log_csv(log, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "station,x,y,z,receiver_id,offset_m,component,real,imag,magnitude");
  std::size_t rows = 0, nan_rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find("nan") != std::string::npos) ++nan_rows;
  }
  EXPECT_EQ(rows, 3u * 3u * 3u);
  EXPECT_EQ(nan_rows, log.failed_stations() * 9u);
}

TEST(SimulateLog, ReceiversMustFitInWindow) {
  const FunctionSampler bg([](const Vec3&) { return Tensor3x3::isotropic(0.1); });
  ToolConfig tool;
  tool.receiver_offsets = {1.0, 5.0};
  expect_error(ErrorCode::InvalidParameter, [&] { simulate_log(bg, Trajectory{}, tool, small_window(), {}); });
}
