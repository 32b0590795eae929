#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "iedd/error.hpp"

namespace iedd::app {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { raise(ErrorCode::Config, msg); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(where + ": unknown key '" + k + "'");
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where + ": not finite");
  return v;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j[key], where + "." + key) : fallback;
}

int integer_or(const json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) fail(where + "." + key + ": expected an integer");
  return j[key].get<int>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where + ": expected [x, y, z]");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

Index3 index3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where + ": expected [i, j, k]");
  Index3 out{};
  for (int a = 0; a < 3; ++a) {
    if (!j[a].is_number_integer()) fail(where + ": expected integers");
    out[a] = j[a].get<std::int64_t>();
  }
  return out;
}

// number | [xx,yy,zz] | [xx,yy,zz,xy,xz,yz] | {h, v, theta?, phi?}
Tensor3x3 tensor(const json& j, const std::string& where) {
  if (j.is_number()) return Tensor3x3::isotropic(number(j, where));
  if (j.is_array()) {
    if (j.size() == 3) return Tensor3x3::diagonal(number(j[0], where), number(j[1], where), number(j[2], where));
    if (j.size() == 6) {
      Tensor3x3 t;
      for (int s = 0; s < 6; ++s) t.v[s] = number(j[s], where);
      return t;
    }
    fail(where + ": tensor arrays have 3 or 6 entries");
  }
  if (j.is_object()) {
    check_keys(j, where, {"h", "v", "theta", "phi"});
    if (!j.contains("h") || !j.contains("v")) fail(where + ": VTI tensor needs h and v");
    return rotate_vti_tensor(number(j["h"], where + ".h"), number(j["v"], where + ".v"),
                             number_or(j, "theta", 0.0, where), number_or(j, "phi", 0.0, where));
  }
  fail(where + ": unsupported tensor form");
}

FormationParams formation_params(const json& j, const std::string& where) {
  FormationParams p;
  if (j.is_null()) return p;
  check_keys(j, where,
             {"shale_sigma_h", "shale_sigma_v", "sand_sigma", "perturbation_center",
              "perturbation_alpha", "perturbation_gamma", "fault_x", "fault_throw", "sand_layers"});
  p.shale_sigma_h = number_or(j, "shale_sigma_h", p.shale_sigma_h, where);
  p.shale_sigma_v = number_or(j, "shale_sigma_v", p.shale_sigma_v, where);
  p.sand_sigma = number_or(j, "sand_sigma", p.sand_sigma, where);
  if (j.contains("perturbation_center"))
    p.perturbation_center = vec3(j["perturbation_center"], where + ".perturbation_center");
  p.perturbation_alpha = number_or(j, "perturbation_alpha", p.perturbation_alpha, where);
  p.perturbation_gamma = number_or(j, "perturbation_gamma", p.perturbation_gamma, where);
  p.fault_x = number_or(j, "fault_x", p.fault_x, where);
  p.fault_throw = number_or(j, "fault_throw", p.fault_throw, where);
  if (j.contains("sand_layers")) {
    p.sand_layers.clear();
    for (const auto& l : j["sand_layers"]) {
      if (!l.is_array() || l.size() != 2) fail(where + ".sand_layers: expected [bottom, top] pairs");
      p.sand_layers.push_back({number(l[0], where), number(l[1], where)});
    }
  }
  return p;
}

// Grid + regions: each region is a physical box [lo, hi) whose cells (by
// centroid) take the region's tensor; later regions win.
ConductivityModel custom_model(const json& j, double sigma0) {
  const json& g = j["grid"];
  check_keys(g, "model.grid", {"counts", "spacing", "origin"});
  if (!g.contains("counts") || !g.contains("spacing")) fail("model.grid: needs counts and spacing");
  const Index3 counts = index3(g["counts"], "model.grid.counts");
  const Vec3 spacing = vec3(g["spacing"], "model.grid.spacing");
  Vec3 origin{};
  if (g.contains("origin")) {
    origin = vec3(g["origin"], "model.grid.origin");
  } else {
    // Centred on the origin by default.
    for (int a = 0; a < 3; ++a) origin[a] = -0.5 * static_cast<double>(counts[a] - 1) * spacing[a];
  }
  const Grid grid(counts, spacing, origin);
  std::vector<Tensor3x3> t(grid.cell_count(), Tensor3x3::isotropic(sigma0));
  if (j.contains("regions")) {
    if (!j["regions"].is_array()) fail("model.regions: expected a list");
    std::size_t r = 0;
    for (const auto& reg : j["regions"]) {
      const std::string where = "model.regions[" + std::to_string(r++) + "]";
      check_keys(reg, where, {"lo", "hi", "sigma"});
      if (!reg.contains("lo") || !reg.contains("hi") || !reg.contains("sigma"))
        fail(where + ": needs lo, hi and sigma");
      const Vec3 lo = vec3(reg["lo"], where + ".lo"), hi = vec3(reg["hi"], where + ".hi");
      const Tensor3x3 s = tensor(reg["sigma"], where + ".sigma");
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Vec3 p = grid.centroid(c);
        if (p[0] >= lo[0] && p[0] < hi[0] && p[1] >= lo[1] && p[1] < hi[1] && p[2] >= lo[2] &&
            p[2] < hi[2])
          t[c] = s;
      }
    }
  }
  return ConductivityModel(grid, std::move(t), sigma0);
}

std::shared_ptr<const ConductivitySampler> global_sampler(const json& j) {
  check_keys(j, "logsim.global", {"type", "scale", "sigma", "formation"});
  const std::string type = j.value("type", "formation");
  if (type == "homogeneous") {
    if (!j.contains("sigma")) fail("logsim.global: homogeneous needs sigma");
    struct Uniform final : ConductivitySampler {
      Tensor3x3 t;
      Tensor3x3 sample(const Vec3&, bool* clamped) const override {
        if (clamped) *clamped = false;
        return t;
      }
    };
    auto u = std::make_shared<Uniform>();
    u->t = tensor(j["sigma"], "logsim.global.sigma");
    return u;
  }
  if (type == "formation") {
    const double s = number_or(j, "scale", 1.0, "logsim.global");
    if (!(s > 0.0 && s <= 1.0)) fail("logsim.global.scale must lie in (0, 1]");
    const FormationParams p = formation_params(j.value("formation", json()), "logsim.global.formation");
    return std::make_shared<FormationSampler>(p.scaled(s));
  }
  fail("logsim.global.type: expected 'formation' or 'homogeneous'");
}

void parse_logsim(const json& j, RunConfig& rc) {
  check_keys(j, "logsim", {"global", "trajectory", "window", "tool"});
  if (j.contains("global")) rc.global = global_sampler(j["global"]);
  if (j.contains("trajectory")) {
    const json& t = j["trajectory"];
    check_keys(t, "logsim.trajectory", {"start", "end", "station_spacing"});
    if (t.contains("start")) rc.trajectory.start = vec3(t["start"], "logsim.trajectory.start");
    if (t.contains("end")) rc.trajectory.end = vec3(t["end"], "logsim.trajectory.end");
    rc.trajectory.station_spacing =
        number_or(t, "station_spacing", rc.trajectory.station_spacing, "logsim.trajectory");
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    check_keys(w, "logsim.window", {"extent", "cell_size", "boxes_along_axis", "sigma0"});
    if (w.contains("extent")) rc.window.extent = vec3(w["extent"], "logsim.window.extent");
    rc.window.cell_size = number_or(w, "cell_size", rc.window.cell_size, "logsim.window");
    rc.window.boxes_along_axis =
        integer_or(w, "boxes_along_axis", rc.window.boxes_along_axis, "logsim.window");
    rc.window.sigma0 = number_or(w, "sigma0", rc.window.sigma0, "logsim.window");
  }
  if (j.contains("tool")) {
    const json& t = j["tool"];
    check_keys(t, "logsim.tool", {"transmitter_axis", "frequency", "moment", "receiver_offsets"});
    if (t.contains("transmitter_axis"))
      rc.tool.transmitter_axis = vec3(t["transmitter_axis"], "logsim.tool.transmitter_axis");
    rc.tool.frequency = number_or(t, "frequency", rc.tool.frequency, "logsim.tool");
    rc.tool.moment = number_or(t, "moment", rc.tool.moment, "logsim.tool");
    if (t.contains("receiver_offsets")) {
      rc.tool.receiver_offsets.clear();
      for (const auto& o : t["receiver_offsets"])
        rc.tool.receiver_offsets.push_back(number(o, "logsim.tool.receiver_offsets"));
    }
  }
}

void parse_output(const json& j, OutputSpec& out) {
  check_keys(j, "output", {"directory", "what"});
  if (j.contains("directory")) {
    if (!j["directory"].is_string()) fail("output.directory: expected a string");
    out.directory = j["directory"].get<std::string>();
  }
  if (j.contains("what")) {
    out.fields = out.logs = out.report = false;
    for (const auto& w : j["what"]) {
      const std::string s = w.is_string() ? w.get<std::string>() : std::string();
      if (s == "fields") out.fields = true;
      else if (s == "logs") out.logs = true;
      else if (s == "report") out.report = true;
      else fail("output.what: expected 'fields', 'logs' or 'report'");
    }
  }
}

void parse_decomposition(const json& j, RunConfig& rc, const std::vector<IndexBox>& default_boxes) {
  check_keys(j, "decomposition",
             {"scheme", "schemes", "boxes", "auto_axis_split", "axis", "outer_tol", "inner_tol",
              "max_sweeps", "parallel_jacobi"});
  DecompositionPlan& p = rc.plan;
  if (j.contains("schemes")) {
    if (!j["schemes"].is_array()) fail("decomposition.schemes: expected a list");
    for (const auto& s : j["schemes"]) rc.schemes.push_back(parse_scheme(s.get<std::string>()));
  }
  if (j.contains("scheme")) rc.schemes.insert(rc.schemes.begin(), parse_scheme(j["scheme"].get<std::string>()));
  if (rc.schemes.empty()) rc.schemes.push_back(Scheme::GsAdaptive);
  p.scheme = rc.schemes.front();
  p.outer_tol = number_or(j, "outer_tol", p.outer_tol, "decomposition");
  p.inner_tol_fixed = number_or(j, "inner_tol", p.inner_tol_fixed, "decomposition");
  p.max_sweeps = integer_or(j, "max_sweeps", p.max_sweeps, "decomposition");
  if (j.contains("parallel_jacobi")) p.parallel_jacobi = j["parallel_jacobi"].get<bool>();
  if (!(p.outer_tol > 0.0 && p.outer_tol < 1.0)) fail("decomposition.outer_tol must lie in (0, 1)");
  if (!(p.inner_tol_fixed > 0.0 && p.inner_tol_fixed < 1.0))
    fail("decomposition.inner_tol must lie in (0, 1)");
  if (p.max_sweeps < 1) fail("decomposition.max_sweeps must be >= 1");
  if (j.contains("boxes") && j.contains("auto_axis_split"))
    fail("decomposition: give either boxes or auto_axis_split");
  p.boxes = default_boxes;
  if (j.contains("boxes")) {
    p.boxes.clear();
    std::size_t b = 0;
    for (const auto& box : j["boxes"]) {
      const std::string where = "decomposition.boxes[" + std::to_string(b++) + "]";
      check_keys(box, where, {"lo", "hi"});
      p.boxes.push_back({index3(box.at("lo"), where + ".lo"), index3(box.at("hi"), where + ".hi")});
    }
  } else if (j.contains("auto_axis_split") && rc.model) {
    const int n = integer_or(j, "auto_axis_split", 1, "decomposition");
    const int axis = integer_or(j, "axis", -1, "decomposition");
    if (n < 1) fail("decomposition.auto_axis_split must be >= 1");
    p.boxes = split_along_axis(rc.model->grid(), n, axis);
  }
}

RunConfig parse_impl(const json& j, bool need_model) {
  RunConfig rc;
  rc.raw = j;
  check_keys(j, "config",
             {"model", "background", "source", "receivers", "receiver_placement", "decomposition",
              "gmres", "logsim", "output"});

  const json bgj = j.value("background", json::object());
  check_keys(bgj, "background", {"sigma0", "frequency"});

  std::vector<IndexBox> default_boxes;
  std::vector<Vec3> default_receivers;
  double sigma0 = number_or(bgj, "sigma0", 0.1, "background");
  double frequency = number_or(bgj, "frequency", 24000.0, "background");
  if (!(sigma0 > 0.0)) fail("background.sigma0 must be positive");
  if (!(frequency > 0.0)) fail("background.frequency must be positive");

  if (j.contains("model")) {
    const json& m = j["model"];
    if (m.contains("builder")) {
      check_keys(m, "model", {"builder", "scale", "formation"});
      const BenchmarkName name = parse_benchmark_name(m["builder"].get<std::string>());
      const double scale = number_or(m, "scale", 1.0, "model");
      BenchmarkModel bm =
          build_benchmark_model(name, scale, formation_params(m.value("formation", json()), "model.formation"));
      if (!bgj.contains("sigma0")) sigma0 = bm.model.sigma0();
      if (!bgj.contains("frequency")) frequency = bm.frequency;
      rc.model.emplace(bm.model.grid(), bm.model.tensors(), sigma0);
      rc.source.position = bm.source_position;
      rc.source.moment = bm.source_moment;
      default_boxes = bm.boxes;
      default_receivers = bm.receivers;
      if (bm.receivers_embedded) rc.placement = ReceiverPlacement::Embedded;
      std::ostringstream label;
      label << to_string(name) << "@" << scale;
      rc.model_label = label.str();
    } else {
      check_keys(m, "model", {"grid", "regions"});
      if (!m.contains("grid")) fail("model: needs a builder or a grid");
      rc.model.emplace(custom_model(m, sigma0));
      default_boxes = {rc.model->grid().full_box()};
      rc.model_label = "custom";
    }
  } else if (need_model) {
    fail("config: missing model section");
  }
  rc.background = Background::from_frequency(sigma0, frequency);
  rc.source.frequency = frequency;

  if (j.contains("source")) {
    const json& s = j["source"];
    check_keys(s, "source", {"position", "moment"});
    if (s.contains("position")) rc.source.position = vec3(s["position"], "source.position");
    if (s.contains("moment")) rc.source.moment = vec3(s["moment"], "source.moment");
  }
  rc.source.validate();

  if (j.contains("receivers")) {
    if (!j["receivers"].is_array()) fail("receivers: expected a list");
    const Vec3 m = rc.source.moment;
    const double mn = norm(m);
    std::size_t k = 0;
    for (const auto& r : j["receivers"]) {
      const std::string where = "receivers[" + std::to_string(k++) + "]";
      check_keys(r, where, {"id", "position", "offset"});
      Receiver rx;
      rx.id = r.value("id", "rx" + std::to_string(k));
      if (r.contains("position") == r.contains("offset"))
        fail(where + ": give exactly one of position or offset");
      if (r.contains("position")) {
        rx.position = vec3(r["position"], where + ".position");
      } else {
        // Offset behind the source along the moment direction.
        const double d = number(r["offset"], where + ".offset");
        rx.position = rc.source.position - (d / mn) * m;
      }
      rc.receivers.push_back(rx);
    }
  } else {
    for (std::size_t k = 0; k < default_receivers.size(); ++k)
      rc.receivers.push_back({"rx" + std::to_string(k + 1), default_receivers[k]});
  }
  if (j.contains("receiver_placement")) {
    const std::string p = j["receiver_placement"].get<std::string>();
    if (p == "strict") rc.placement = ReceiverPlacement::Strict;
    else if (p == "embedded") rc.placement = ReceiverPlacement::Embedded;
    else fail("receiver_placement: expected 'strict' or 'embedded'");
  }

  parse_decomposition(j.value("decomposition", json::object()), rc, default_boxes);

  if (j.contains("gmres")) {
    const json& g = j["gmres"];
    check_keys(g, "gmres", {"restart", "max_outer"});
    rc.gmres.restart = integer_or(g, "restart", rc.gmres.restart, "gmres");
    rc.gmres.max_outer = integer_or(g, "max_outer", rc.gmres.max_outer, "gmres");
  }
  rc.gmres.tol = rc.plan.inner_tol_fixed;
  rc.gmres.validate();

  if (j.contains("logsim")) parse_logsim(j["logsim"], rc);
  if (!rc.global && rc.model) {
    // The solve model doubles as the global model for logging.
    rc.global = std::make_shared<ConductivityModel>(*rc.model);
  }
  parse_output(j.value("output", json::object()), rc.output);
  return rc;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j, bool need_model) {
  try {
    return parse_impl(j, need_model);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    raise(ErrorCode::Config, std::string("invalid configuration: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::Config, std::string("invalid configuration: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path, bool need_model) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Config, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::Config, "cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(j, need_model);
}

}  // namespace iedd::app
