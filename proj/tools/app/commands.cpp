#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include "iedd/error.hpp"

namespace iedd::app {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) raise(ErrorCode::Io, "cannot write " + p.string());
  return f;
}

void write_json(const std::filesystem::path& p, const json& j) {
  auto f = open_out(p);
  f << j.dump(2) << '\n';
}

json box_json(const IndexBox& b) {
  return {{"lo", b.lo}, {"hi", b.hi}};
}

json history_json(const std::vector<SweepRecord>& h) {
  json out = json::array();
  for (const SweepRecord& r : h)
    out.push_back({{"sweep", r.sweep},
                   {"gmres_iterations", r.gmres_iterations},
                   {"inner_tol", r.inner_tol},
                   {"full_residual", r.full_residual}});
  return out;
}

int total_iterations(const std::vector<SweepRecord>& h) {
  int n = 0;
  for (const SweepRecord& r : h)
    for (int it : r.gmres_iterations) n += it;
  return n;
}

// Partition and receiver placement are part of the configuration: check them
// before any work so that a bad setup exits without outputs.
void precheck(const RunConfig& rc, Scheme scheme, const ComplexVectorField& E0) {
  const ContrastField contrast = contrast_field(*rc.model);
  if (scheme != Scheme::FullDomain) partition(rc.model->grid(), contrast.mask, rc.plan.boxes, scheme);
  receiver_H(E0, contrast, rc.receivers, rc.source, rc.background, rc.placement);
}

struct SolveOutcome {
  bool converged = false;
  std::string message;
  std::optional<DdResult> result;
  std::vector<SweepRecord> history;
  double initial_residual = 0.0;
  double seconds = 0.0;
};

SolveOutcome run_scheme(const RunConfig& rc, Scheme scheme, const ComplexVectorField& E0,
                        std::shared_ptr<KernelRepository> kernels) {
  DecompositionPlan plan = rc.plan;
  plan.scheme = scheme;
  SolveOutcome out;
  const auto t0 = Clock::now();
  try {
    DdResult r = solve_dd(*rc.model, rc.background, plan, E0, rc.gmres, std::move(kernels));
    out.converged = true;
    out.history = r.state.history;
    out.initial_residual = r.state.initial_residual;
    out.result = std::move(r);
  } catch (const DdNonConvergence& e) {
    out.message = e.what();
    out.history = e.history();
    out.initial_residual = e.initial_residual();
  } catch (const SweepError& e) {
    out.message = std::string(e.what()) + " (subdomain " + std::to_string(e.subdomain()) + ")";
  }
  out.seconds = seconds_since(t0);
  return out;
}

std::vector<CVec3> receivers_for(const RunConfig& rc, const ComplexVectorField& E) {
  return receiver_H(E, contrast_field(*rc.model), rc.receivers, rc.source, rc.background,
                    rc.placement);
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "iedd: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "iedd: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_history_csv(const std::vector<SweepRecord>& history, double initial_residual,
                       std::ostream& out) {
  out << "sweep,subdomain,gmres_iters,inner_tol,full_residual\n";
  out << "0,,,," << format_number(initial_residual) << '\n';
  for (const SweepRecord& r : history)
    for (std::size_t i = 0; i < r.gmres_iterations.size(); ++i)
      out << r.sweep << ',' << i << ',' << r.gmres_iterations[i] << ','
          << format_number(r.inner_tol[i]) << ',' << format_number(r.full_residual) << '\n';
}

void write_receivers_csv(const std::vector<Receiver>& receivers, const std::vector<CVec3>& H,
                         std::ostream& out) {
  static const char* comp[] = {"x", "y", "z"};
  out << "receiver_id,x,y,z,component,real,imag,magnitude\n";
  for (std::size_t k = 0; k < receivers.size(); ++k) {
    const Vec3& p = receivers[k].position;
    for (int c = 0; c < 3; ++c)
      out << receivers[k].id << ',' << format_number(p[0]) << ',' << format_number(p[1]) << ','
          << format_number(p[2]) << ',' << comp[c] << ',' << format_number(H[k][c].real()) << ','
          << format_number(H[k][c].imag()) << ',' << format_number(std::abs(H[k][c])) << '\n';
  }
}

int cmd_solve(const std::filesystem::path& config, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    const ComplexVectorField E0 = background_E_on_grid(rc.source, rc.model->grid(), rc.background);
    precheck(rc, rc.plan.scheme, E0);

    const SolveOutcome out = run_scheme(rc, rc.plan.scheme, E0, nullptr);
    std::vector<CVec3> H;
    if (out.converged) H = receivers_for(rc, out.result->E);

    std::filesystem::create_directories(rc.output.directory);
    const auto& dir = rc.output.directory;
    if (rc.output.fields && out.converged) write_field_binary(out.result->E, dir / "fields.bin");
    if (rc.output.logs) {
      auto h = open_out(dir / "history.csv");
      write_history_csv(out.history, out.initial_residual, h);
      if (out.converged) {
        auto r = open_out(dir / "receivers.csv");
        write_receivers_csv(rc.receivers, H, r);
      }
    }
    if (rc.output.report) {
      json rep;
      rep["command"] = "solve";
      rep["model"] = rc.model_label;
      rep["grid"] = {{"counts", rc.model->grid().counts()}, {"spacing", rc.model->grid().spacing()}};
      rep["anomalous_cells"] = contrast_field(*rc.model).mask.count();
      rep["scheme"] = to_string(rc.plan.scheme);
      rep["converged"] = out.converged;
      if (!out.converged) rep["message"] = out.message;
      rep["sweeps"] = out.history.size();
      rep["total_gmres_iterations"] = total_iterations(out.history);
      rep["initial_residual"] = out.initial_residual;
      rep["final_residual"] = out.history.empty() ? out.initial_residual : out.history.back().full_residual;
      rep["history"] = history_json(out.history);
      json boxes = json::array();
      for (const IndexBox& b : rc.plan.boxes) boxes.push_back(box_json(b));
      rep["subdomains"] = boxes;
      if (out.converged) rep["warnings"] = out.result->state.warnings;
      rep["wall_time_s"] = out.seconds;
      write_json(dir / "report.json", rep);
    }
    if (!out.converged) {
      err << "iedd: " << out.message << '\n';
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_compare(const std::filesystem::path& config, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config);
    if (rc.schemes.size() < 2) raise(ErrorCode::Config, "compare needs at least two schemes");
    const ComplexVectorField E0 = background_E_on_grid(rc.source, rc.model->grid(), rc.background);
    for (Scheme s : rc.schemes) precheck(rc, s, E0);

    auto kernels = std::make_shared<KernelRepository>();
    std::vector<SolveOutcome> runs;
    std::vector<std::vector<CVec3>> H;
    for (Scheme s : rc.schemes) {
      runs.push_back(run_scheme(rc, s, E0, kernels));
      H.push_back(runs.back().converged ? receivers_for(rc, runs.back().result->E)
                                        : std::vector<CVec3>{});
    }

    std::filesystem::create_directories(rc.output.directory);
    const auto& dir = rc.output.directory;
    bool all_ok = true;
    json rows = json::array();
    {
      auto f = open_out(dir / "compare.csv");
      f << "scheme,target_inner_tol,total_gmres_iterations,outer_iterations,final_residual,status,"
           "wall_time_s\n";
      for (std::size_t k = 0; k < runs.size(); ++k) {
        const Scheme s = rc.schemes[k];
        const SolveOutcome& r = runs[k];
        all_ok = all_ok && r.converged;
        const std::string target = s == Scheme::FullDomain ? format_number(rc.plan.outer_tol)
                                   : is_adaptive(s)        ? std::string("adaptive")
                                                           : format_number(rc.plan.inner_tol_fixed);
        const double final_res = r.history.empty() ? r.initial_residual : r.history.back().full_residual;
        f << to_string(s) << ',' << target << ',' << total_iterations(r.history) << ','
          << r.history.size() << ',' << format_number(final_res) << ','
          << (r.converged ? "ok" : "failed") << ',' << r.seconds << '\n';
        json row{{"scheme", to_string(s)},
                 {"target_inner_tol", target},
                 {"total_gmres_iterations", total_iterations(r.history)},
                 {"outer_iterations", r.history.size()},
                 {"final_residual", final_res},
                 {"status", r.converged ? "ok" : "failed"},
                 {"wall_time_s", r.seconds},
                 {"history", history_json(r.history)}};
        if (!r.converged) row["message"] = r.message;
        // Mean normalized receiver |H| difference against the first scheme.
        if (r.converged && runs[0].converged && !rc.receivers.empty()) {
          double acc = 0.0;
          for (std::size_t i = 0; i < rc.receivers.size(); ++i)
            acc += std::abs(norm(H[k][i]) - norm(H[0][i])) / norm(H[0][i]);
          row["mean_normalized_H_difference"] = acc / static_cast<double>(rc.receivers.size());
        }
        rows.push_back(row);
      }
    }
    if (rc.output.logs)
      for (std::size_t k = 0; k < runs.size(); ++k) {
        auto h = open_out(dir / ("history_" + to_string(rc.schemes[k]) + ".csv"));
        write_history_csv(runs[k].history, runs[k].initial_residual, h);
      }
    if (rc.output.report) {
      json rep{{"command", "compare"}, {"model", rc.model_label}, {"schemes", rows}};
      write_json(dir / "report.json", rep);
    }
    if (!all_ok) {
      err << "iedd: at least one scheme failed\n";
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_logsim(const std::filesystem::path& config, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig rc = load_config(config, false);
    if (!rc.global) raise(ErrorCode::Config, "logsim needs logsim.global or a model section");
    rc.tool.validate();
    rc.window.validate();
    rc.trajectory.validate();

    LogSimConfig cfg;
    cfg.scheme = rc.plan.scheme;
    const json dec = rc.raw.value("decomposition", json::object());
    if (dec.contains("outer_tol")) cfg.outer_tol = rc.plan.outer_tol;
    if (dec.contains("max_sweeps")) cfg.max_sweeps = rc.plan.max_sweeps;
    cfg.gmres = rc.gmres;
    cfg.parallel_jacobi = rc.plan.parallel_jacobi;

    const auto t0 = Clock::now();
    const LogResult log = simulate_log(*rc.global, rc.trajectory, rc.tool, rc.window, cfg);
    const double secs = seconds_since(t0);

    std::filesystem::create_directories(rc.output.directory);
    const auto& dir = rc.output.directory;
    if (rc.output.logs) {
      auto f = open_out(dir / "log.csv");
      write_log_csv(log, f);
    }
    if (rc.output.report) {
      json stations = json::array();
      for (const StationRecord& s : log.stations) {
        json st{{"index", s.index},
                {"position", s.position},
                {"ok", s.ok},
                {"sweeps", s.sweeps},
                {"gmres_iterations", s.gmres_iterations},
                {"residual", s.residual},
                {"clamped_cells", s.clamped_cells}};
        if (!s.ok) st["error"] = s.error;
        stations.push_back(st);
      }
      json rep{{"command", "logsim"},
               {"scheme", to_string(cfg.scheme)},
               {"outer_tol", cfg.outer_tol},
               {"window_counts", rc.window.counts()},
               {"stations", stations},
               {"failed_stations", log.failed_stations()},
               {"wall_time_s", secs}};
      write_json(dir / "report.json", rep);
    }
    if (log.failed_stations() > 0) {
      err << "iedd: " << log.failed_stations() << " station(s) failed\n";
      return static_cast<int>(kNotConverged);
    }
    return static_cast<int>(kOk);
  });
}

}  // namespace iedd::app
