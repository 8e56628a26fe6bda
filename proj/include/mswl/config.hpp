#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "mswl/evolution.hpp"
#include "mswl/interaction.hpp"

namespace mswl {

struct CenterSpec {
    std::string family = "gaussian";  // zero, gaussian, poschl_teller, compact
    double depth = 20.0;
    double width = 1.0;
    std::string state = "ground";  // ground or zero

    bool operator==(const CenterSpec&) const = default;
};

struct GridParams {
    double x1_lo = -20.0;
    double x1_hi = 40.0;
    double rho = 20.0;
    double h = 0.25;

    bool operator==(const GridParams&) const = default;
};

struct SolverParams {
    double cfl = 0.4;
    double sponge_width = 4.0;
    double sponge_strength = 3.0;
    std::size_t sample_stride = 2;

    bool operator==(const SolverParams&) const = default;
};

struct Tolerances {
    double iteration = 1e-8;
    double velocity = 1e-8;
    double elliptic = 1e-11;

    bool operator==(const Tolerances&) const = default;
};

struct RemarkParams {
    double t_lo = 10.0;
    double t_hi = 1000.0;
    std::size_t samples = 25;
    double eta = 0.25;

    bool operator==(const RemarkParams&) const = default;
};

struct DecayParams {
    double T = 200.0;
    double t1 = 10.0;
    double fit_lo = 20.0;
    double fit_hi = 100.0;

    bool operator==(const DecayParams&) const = default;
};

struct TermSwitches {
    bool printed_rhs_sign = false;
    bool printed_m2_coefficient = false;

    bool operator==(const TermSwitches&) const = default;
};

struct ExperimentConfig {
    std::array<CenterSpec, 2> centers{};
    Velocity velocity{0.5, 0.0, 0.0};  // of center 1; center 0 is at rest
    GridParams grid{};
    SolverParams solver{};
    double t0 = 10.0;
    double T = 30.0;
    double epsilon = 0.05;
    Tolerances tolerances{};
    std::size_t max_iters = 12;
    double mode_amplitude = 0.01;
    TermSwitches terms{};
    RemarkParams remark{};
    DecayParams decay{};
    std::string output = "out";
    std::uint64_t seed = 0;

    bool operator==(const ExperimentConfig&) const = default;

    SolverConfig solver_config() const;
    TermOptions term_options() const;
};

/// Strict JSON config: every key optional, unknown keys and wrong types
/// rejected with line and column.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json config_json(const ExperimentConfig& cfg);
/// FNV-1a of the canonical dump.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace mswl
