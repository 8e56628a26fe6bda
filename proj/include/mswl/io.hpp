#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mswl {

inline constexpr const char* version_string = "0.3.1";

/// Stamped at the top of every artifact.
struct Provenance {
    std::string config_hash = "none";
    std::string version = version_string;
};

/// 64-bit FNV-1a of a byte string, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const Provenance& prov = {});
/// Writes {"provenance": ..., then the payload keys in order}.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& payload,
                const Provenance& prov = {});

}  // namespace mswl
