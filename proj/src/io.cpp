#include "mswl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "mswl/error.hpp"

namespace mswl {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const Provenance& prov) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string());
    os << "# mswl " << prov.version << " config " << prov.config_hash << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    char buf[32];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            os << (i ? "," : "") << buf;
        }
        os << '\n';
    }
    if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& payload, const Provenance& prov) {
    nlohmann::ordered_json doc;
    doc["provenance"] = {{"tool", "mswl"}, {"version", prov.version}, {"config_hash", prov.config_hash}};
    for (const auto& [k, v] : payload.items()) doc[k] = v;
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string());
    os << doc.dump(2) << '\n';
    if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace mswl
