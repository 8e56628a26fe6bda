#include "mswl/config.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "mswl/error.hpp"

namespace mswl {

using nlohmann::json;

namespace {

struct Locator {
    const std::string& text;

    std::string at(std::size_t offset) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return "line " + std::to_string(line) + ", column " + std::to_string(col);
    }

    // Offset of the key token for a dotted path; keys are searched in order
    // so a nested key is found after its parent.
    std::size_t key_offset(const std::vector<std::string>& path) const {
        std::size_t pos = 0;
        for (const auto& k : path) {
            if (k.empty() || k[0] == '[') continue;
            const std::regex re("\"" + std::regex_replace(k, std::regex(R"([.^$|()\[\]{}*+?\\])"), R"(\$&)") +
                                "\"\\s*:");
            std::smatch m;
            auto begin = text.cbegin() + static_cast<std::ptrdiff_t>(pos);
            if (!std::regex_search(begin, text.cend(), m, re)) break;
            pos += static_cast<std::size_t>(m.position(0));
        }
        return pos;
    }
};

std::string dotted(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& k : path) {
        if (!s.empty() && k[0] != '[') s += '.';
        s += k;
    }
    return s;
}

class Reader {
public:
    Reader(const Locator& loc) : loc_(loc) {}

    [[noreturn]] void fail(ErrorKind kind, const std::vector<std::string>& path, const std::string& what) const {
        throw Error(kind, "config " + loc_.at(loc_.key_offset(path)) + ": " + what + " '" + dotted(path) + "'");
    }

    void check_keys(const json& obj, const std::vector<std::string>& path, const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(ErrorKind::config, path, "expected an object at");
        for (const auto& [k, _] : obj.items()) {
            if (!allowed.count(k)) {
                auto p = path;
                p.push_back(k);
                fail(ErrorKind::config, p, "unknown key");
            }
        }
    }

    void number(const json& obj, std::vector<std::string> path, double& out) const {
        const auto& key = path.back();
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number()) fail(ErrorKind::config, path, "malformed number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(ErrorKind::config, path, "malformed number");
    }

    void positive(const json& obj, std::vector<std::string> path, double& out) const {
        number(obj, path, out);
        if (!(out > 0.0)) fail(ErrorKind::config, path, "must be positive:");
    }

    template <class U>
    void count(const json& obj, std::vector<std::string> path, U& out, U min = 0) const {
        const auto& key = path.back();
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            fail(ErrorKind::config, path, "expected a nonnegative integer at");
        out = v.get<U>();
        if (out < min) fail(ErrorKind::config, path, "too small:");
    }

    void flag(const json& obj, std::vector<std::string> path, bool& out) const {
        const auto& key = path.back();
        if (!obj.contains(key)) return;
        if (!obj.at(key).is_boolean()) fail(ErrorKind::config, path, "expected true or false at");
        out = obj.at(key).get<bool>();
    }

    void text(const json& obj, std::vector<std::string> path, std::string& out,
              const std::set<std::string>& choices = {}) const {
        const auto& key = path.back();
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_string()) fail(ErrorKind::config, path, "expected a string at");
        out = v.get<std::string>();
        if (!choices.empty() && !choices.count(out)) fail(ErrorKind::config, path, "unsupported value '" + out + "' at");
    }

private:
    const Locator& loc_;
};

}  // namespace

SolverConfig ExperimentConfig::solver_config() const {
    SolverConfig c;
    c.grid = Grid::axisymmetric(grid.x1_lo, grid.x1_hi, grid.rho, grid.h);
    c.cfl = solver.cfl;
    c.sponge_width = solver.sponge_width;
    c.sponge_strength = solver.sponge_strength;
    c.sample_stride = solver.sample_stride;
    c.t0 = t0;
    c.T = T;
    return c;
}

TermOptions ExperimentConfig::term_options() const {
    TermOptions o;
    o.printed_rhs_sign = terms.printed_rhs_sign;
    o.printed_m2_coefficient = terms.printed_m2_coefficient;
    return o;
}

ExperimentConfig parse_config(const std::string& input) {
    const Locator loc{input};
    json j;
    try {
        j = json::parse(input, nullptr, true, true);
    } catch (const json::parse_error& e) {
        const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
        const std::string msg = e.what();
        const bool numeric = msg.find("number") != std::string::npos;
        throw Error(ErrorKind::config,
                    "config " + loc.at(at) + ": " + (numeric ? "malformed number" : "syntax error"));
    }
    ExperimentConfig c;
    const Reader r(loc);
    r.check_keys(j, {},
                 {"centers", "velocity", "grid", "solver", "t0", "T", "epsilon", "tolerances", "max_iters",
                  "mode_amplitude", "terms", "remark", "decay", "output", "seed"});

    if (j.contains("centers")) {
        const auto& cs = j.at("centers");
        if (!cs.is_array() || cs.size() != 2) r.fail(ErrorKind::config, {"centers"}, "expected two entries in");
        for (std::size_t i = 0; i < 2; ++i) {
            const std::vector<std::string> p{"centers", "[" + std::to_string(i) + "]"};
            r.check_keys(cs[i], p, {"family", "depth", "width", "state"});
            auto& s = c.centers[i];
            auto q = p;
            q.push_back("family");
            r.text(cs[i], q, s.family, {"zero", "gaussian", "poschl_teller", "compact"});
            q.back() = "depth";
            r.number(cs[i], q, s.depth);
            q.back() = "width";
            r.positive(cs[i], q, s.width);
            q.back() = "state";
            r.text(cs[i], q, s.state, {"ground", "zero"});
        }
    }

    if (j.contains("velocity")) {
        const auto& v = j.at("velocity");
        if (v.is_number()) {
            c.velocity = {v.get<double>(), 0.0, 0.0};
        } else if (v.is_array() && v.size() == 3 && v[0].is_number() && v[1].is_number() && v[2].is_number()) {
            c.velocity = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
        } else {
            r.fail(ErrorKind::config, {"velocity"}, "malformed number");
        }
    }
    const double s = speed(c.velocity);
    if (!std::isfinite(s)) r.fail(ErrorKind::config, {"velocity"}, "malformed number");
    if (s >= 1.0) r.fail(ErrorKind::superluminal, {"velocity"}, "superluminal velocity");
    if (s == 0.0) r.fail(ErrorKind::config, {"velocity"}, "velocities must be distinct:");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        r.check_keys(g, {"grid"}, {"x1_lo", "x1_hi", "rho", "h"});
        r.number(g, {"grid", "x1_lo"}, c.grid.x1_lo);
        r.number(g, {"grid", "x1_hi"}, c.grid.x1_hi);
        r.positive(g, {"grid", "rho"}, c.grid.rho);
        r.positive(g, {"grid", "h"}, c.grid.h);
        if (!(c.grid.x1_hi > c.grid.x1_lo)) r.fail(ErrorKind::config, {"grid", "x1_hi"}, "empty range at");
    }
    if (j.contains("solver")) {
        const auto& g = j.at("solver");
        r.check_keys(g, {"solver"}, {"cfl", "sponge_width", "sponge_strength", "sample_stride"});
        r.positive(g, {"solver", "cfl"}, c.solver.cfl);
        r.number(g, {"solver", "sponge_width"}, c.solver.sponge_width);
        r.number(g, {"solver", "sponge_strength"}, c.solver.sponge_strength);
        r.count<std::size_t>(g, {"solver", "sample_stride"}, c.solver.sample_stride, 1);
    }
    r.number(j, {"t0"}, c.t0);
    r.number(j, {"T"}, c.T);
    if (!(c.T > c.t0)) r.fail(ErrorKind::config, {"T"}, "T must exceed t0:");
    r.positive(j, {"epsilon"}, c.epsilon);
    if (j.contains("tolerances")) {
        const auto& g = j.at("tolerances");
        r.check_keys(g, {"tolerances"}, {"iteration", "velocity", "elliptic"});
        r.positive(g, {"tolerances", "iteration"}, c.tolerances.iteration);
        r.positive(g, {"tolerances", "velocity"}, c.tolerances.velocity);
        r.positive(g, {"tolerances", "elliptic"}, c.tolerances.elliptic);
    }
    r.count<std::size_t>(j, {"max_iters"}, c.max_iters, 1);
    r.number(j, {"mode_amplitude"}, c.mode_amplitude);
    if (j.contains("terms")) {
        const auto& g = j.at("terms");
        r.check_keys(g, {"terms"}, {"printed_rhs_sign", "printed_m2_coefficient"});
        r.flag(g, {"terms", "printed_rhs_sign"}, c.terms.printed_rhs_sign);
        r.flag(g, {"terms", "printed_m2_coefficient"}, c.terms.printed_m2_coefficient);
    }
    if (j.contains("remark")) {
        const auto& g = j.at("remark");
        r.check_keys(g, {"remark"}, {"t_lo", "t_hi", "samples", "eta"});
        r.positive(g, {"remark", "t_lo"}, c.remark.t_lo);
        r.positive(g, {"remark", "t_hi"}, c.remark.t_hi);
        r.count<std::size_t>(g, {"remark", "samples"}, c.remark.samples, 3);
        r.positive(g, {"remark", "eta"}, c.remark.eta);
        if (!(c.remark.t_hi > c.remark.t_lo)) r.fail(ErrorKind::config, {"remark", "t_hi"}, "empty range at");
    }
    if (j.contains("decay")) {
        const auto& g = j.at("decay");
        r.check_keys(g, {"decay"}, {"T", "t1", "fit_lo", "fit_hi"});
        r.positive(g, {"decay", "T"}, c.decay.T);
        r.number(g, {"decay", "t1"}, c.decay.t1);
        r.positive(g, {"decay", "fit_lo"}, c.decay.fit_lo);
        r.positive(g, {"decay", "fit_hi"}, c.decay.fit_hi);
        if (!(c.decay.T > c.decay.t1)) r.fail(ErrorKind::config, {"decay", "T"}, "T must exceed t1:");
        if (!(c.decay.fit_hi > c.decay.fit_lo)) r.fail(ErrorKind::config, {"decay", "fit_hi"}, "empty range at");
    }
    r.text(j, {"output"}, c.output);
    r.count<std::uint64_t>(j, {"seed"}, c.seed);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot read " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["centers"] = nlohmann::ordered_json::array();
    for (const auto& s : c.centers)
        j["centers"].push_back({{"family", s.family}, {"depth", s.depth}, {"width", s.width}, {"state", s.state}});
    j["velocity"] = c.velocity;
    j["grid"] = {{"x1_lo", c.grid.x1_lo}, {"x1_hi", c.grid.x1_hi}, {"rho", c.grid.rho}, {"h", c.grid.h}};
    j["solver"] = {{"cfl", c.solver.cfl},
                   {"sponge_width", c.solver.sponge_width},
                   {"sponge_strength", c.solver.sponge_strength},
                   {"sample_stride", c.solver.sample_stride}};
    j["t0"] = c.t0;
    j["T"] = c.T;
    j["epsilon"] = c.epsilon;
    j["tolerances"] = {{"iteration", c.tolerances.iteration},
                       {"velocity", c.tolerances.velocity},
                       {"elliptic", c.tolerances.elliptic}};
    j["max_iters"] = c.max_iters;
    j["mode_amplitude"] = c.mode_amplitude;
    j["terms"] = {{"printed_rhs_sign", c.terms.printed_rhs_sign},
                  {"printed_m2_coefficient", c.terms.printed_m2_coefficient}};
    j["remark"] = {{"t_lo", c.remark.t_lo}, {"t_hi", c.remark.t_hi}, {"samples", c.remark.samples}, {"eta", c.remark.eta}};
    j["decay"] = {{"T", c.decay.T}, {"t1", c.decay.t1}, {"fit_lo", c.decay.fit_lo}, {"fit_hi", c.decay.fit_hi}};
    j["output"] = c.output;
    j["seed"] = c.seed;
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) { return fnv1a_hex(config_json(cfg).dump()); }

}  // namespace mswl
