#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mswl/io.hpp"

namespace mswl {

struct RadialPotential {
    std::function<double(double)> eval;
    double decay_exponent = 4.0;
    double cutoff_radius = 200.0;
    std::string family = "zero";
    std::vector<double> params;

    double operator()(double r) const { return eval ? eval(r) : 0.0; }
    /// Finite at 0 and (1+r)^beta |V| not growing on the sampled tail.
    void validate() const;
};

RadialPotential zero_potential();
/// -depth * exp(-(r/width)^2)
RadialPotential gaussian_well(double depth, double width = 1.0);
/// -depth * sech^2(r/width)
RadialPotential poschl_teller_well(double depth, double width = 1.0);
/// -depth * (1 - (r/radius)^2)^2 on r < radius
RadialPotential compact_bump(double depth, double radius);
/// Builds a family by name: zero, gaussian, poschl_teller, compact.
RadialPotential make_potential(const std::string& family, double depth, double width);

struct EllipticConfig {
    double r_max = 200.0;
    std::size_t n = 20000;
    double refinement = 3.0;  // grid r_i = R (e^{k i/N} - 1)/(e^k - 1)
    double blowup_bound = 1e3;
    double rtol = 1e-11;
    double atol = 1e-13;
    double tail_threshold = 0.05;  // relative to max |u|
    double spectrum_h = 0.02;
    double spectrum_r = 60.0;
    double resonance_threshold = 1e-4;
    std::size_t alpha_scan = 48;
    double alpha_min = 1e-5;
};

std::vector<double> radial_grid(const EllipticConfig& cfg);

/// O(1) lookup table of a radial profile on a uniform grid, tail_c / r^p
/// beyond it. Odd tables (radial derivatives) reflect with a sign flip.
class RadialTable {
public:
    RadialTable() = default;
    RadialTable(std::vector<double> values, double dr, double tail_c, int tail_power = 1, bool odd = false);
    static RadialTable sample(const std::function<double(double)>& f, double dr, double extent, double tail_c,
                              int tail_power = 1, bool odd = false);
    double operator()(double r) const;
    double r_max() const { return dr_ * static_cast<double>(values_.size() - 1); }

private:
    std::vector<double> values_{0.0, 0.0, 0.0, 0.0};
    double dr_ = 1.0;
    double tail_c_ = 0.0;
    int tail_power_ = 1;
    bool odd_ = false;
};

struct StaticState {
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> residual;
    double far_field_c = 0.0;
    double far_field_residual = 0.0;
    double energy = 0.0;
    double shoot_alpha = 0.0;
    double max_residual = 0.0;
    int nodes = 0;
    std::string tag;

    bool is_zero() const;
    /// Cubic Hermite on the grid, c/r beyond it.
    double operator()(double radius) const;
    double derivative(double radius) const;
    RadialTable table(double dr = 0.01, double extent = -1.0) const;
    RadialTable derivative_table(double dr = 0.01, double extent = -1.0) const;
};

/// Raw shot: integrated profile up to R_max or the blow-up radius.
struct Shot {
    std::vector<double> u;
    std::vector<double> du;
    std::size_t reached = 0;  // nodes integrated
    double blowup_radius = -1.0;
    int terminal_sign = 0;  // sign of the blow-up, else of u + r u' at R_max
    int zero_crossings = 0;
};

Shot shoot(const RadialPotential& V, double alpha, const std::vector<double>& grid, const EllipticConfig& cfg);

StaticState solve_radial_static(const RadialPotential& V, double alpha, const EllipticConfig& cfg = {});
double energy_J(const StaticState& state, const RadialPotential& V);

struct FarField {
    double c = 0.0;
    double residual = 0.0;
};
FarField far_field_coefficient(const StaticState& state, double threshold = 1e-2);
FarField far_field_fit(const std::vector<double>& r, const std::vector<double>& u);

struct LinearizationSpectrum {
    std::vector<double> negative_eigenvalues;
    std::array<std::size_t, 3> per_sector{0, 0, 0};
    std::array<std::vector<double>, 3> sector_eigenvalues;
    double zero_resonance_indicator = 1.0;
    bool is_stable = true;
};

LinearizationSpectrum linearization_spectrum(const StaticState& state, const RadialPotential& V,
                                             const EllipticConfig& cfg = {});
/// Zero-energy s-wave solution phi ~ A + B/r; returns |A| / max |phi|.
double zero_resonance_indicator(const std::function<double(double)>& q, const EllipticConfig& cfg);

/// Every shooting solution bracketed on a log scan of alpha in (alpha_min, alpha_max].
std::vector<StaticState> find_static_states(const RadialPotential& V, double alpha_max, const EllipticConfig& cfg = {});
StaticState find_ground_state(const RadialPotential& V, const EllipticConfig& cfg = {});
/// The trivial solution W = 0 on the configured grid.
StaticState zero_static_state(const EllipticConfig& cfg = {});

nlohmann::ordered_json static_state_json(const StaticState& s, const LinearizationSpectrum* spectrum = nullptr);
/// stem.csv (r, u, residual) and stem.json.
void write_static_state(const std::filesystem::path& stem, const StaticState& s,
                        const LinearizationSpectrum* spectrum = nullptr, const Provenance& prov = {});

}  // namespace mswl
