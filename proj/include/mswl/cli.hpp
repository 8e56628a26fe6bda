#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mswl/config.hpp"

namespace mswl {

const std::vector<std::string>& subcommand_names();

struct SubcommandReport {
    std::string name;
    std::vector<std::filesystem::path> artifacts;
    nlohmann::ordered_json summary;
};

/// Runs one pipeline and writes its artifacts under `out`. Errors propagate
/// as mswl::Error; prerequisites are checked before the expensive part.
SubcommandReport run_subcommand(const std::string& name, const ExperimentConfig& cfg, const std::filesystem::path& out);

}  // namespace mswl
