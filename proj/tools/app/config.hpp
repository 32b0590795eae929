#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "iedd/benchmark_models.hpp"
#include "iedd/decomposition.hpp"
#include "iedd/logsim.hpp"
#include "iedd/sources.hpp"

namespace iedd::app {

struct OutputSpec {
  std::filesystem::path directory = "iedd_out";
  bool fields = true;
  bool logs = true;
  bool report = true;
};

// Everything a command needs, fully built and validated.
struct RunConfig {
  nlohmann::json raw;
  std::optional<ConductivityModel> model;  // absent only for logsim on an analytic global
  std::string model_label;
  Background background;
  DipoleSource source;
  std::vector<Receiver> receivers;
  ReceiverPlacement placement = ReceiverPlacement::Strict;
  DecompositionPlan plan;               // scheme = first listed
  std::vector<Scheme> schemes;          // every listed scheme
  GmresConfig gmres;

  // logsim
  std::shared_ptr<const ConductivitySampler> global;
  Trajectory trajectory;
  WindowSpec window;
  ToolConfig tool;

  OutputSpec output;
};

// Parse and validate. Throws Error(Config) with a readable message.
RunConfig parse_config(const nlohmann::json& j, bool need_model = true);
RunConfig load_config(const std::filesystem::path& path, bool need_model = true);

}  // namespace iedd::app
