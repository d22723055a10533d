#include "salt/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace salt {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    if (trim(s).empty()) return parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("expected a number, got '" + std::string(s) + "'");
    return v;
}

template <class Int>
Int to_integer(std::string_view s) {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError("expected an integer, got '" + std::string(s) + "'");
    return v;
}

bool to_bool(std::string_view s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

WaveVector to_wavevector(std::string_view s) {
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw ConfigError("expected a wavevector 'k1,k2', got '" + std::string(s) + "'");
    return {to_integer<int>(parts[0]), to_integer<int>(parts[1])};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(WaveVector k) { return std::to_string(k.k1) + "," + std::to_string(k.k2); }

template <class T, class F>
std::string join(const std::vector<T>& items, const char* sep, F&& render) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += render(items[i]);
    }
    return out;
}

const char* scheme_name(NoiseScheme s) {
    return s == NoiseScheme::stratonovich_ssprk3 ? "stratonovich_ssprk3" : "ito_euler";
}

// Noise modes are split across two keys; they are collected during parsing
// and combined afterwards.
struct PendingNoise {
    std::vector<WaveVector> ks{{2, 4}};
    std::vector<double> alphas{0.001};
};

using Setter = std::function<void(Config&, PendingNoise&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"grid_n", [](Config& c, PendingNoise&, std::string_view v) {
             try {
                 c.sim.grid = Grid(to_integer<int>(v));
             } catch (const DimensionError& e) {
                 throw ConfigError(e.what());
             }
         }},
        {"dt", [](Config& c, PendingNoise&, std::string_view v) { c.sim.dt = to_double(v); }},
        {"t_end", [](Config& c, PendingNoise&, std::string_view v) { c.sim.t_end = to_double(v); }},
        {"damping", [](Config& c, PendingNoise&, std::string_view v) { c.sim.damping = to_double(v); }},
        {"forcing_amplitude",
         [](Config& c, PendingNoise&, std::string_view v) { c.sim.forcing_amplitude = to_double(v); }},
        {"alpha",
         [](Config&, PendingNoise& n, std::string_view v) {
             n.alphas.clear();
             for (auto part : split(v, ',')) n.alphas.push_back(to_double(part));
         }},
        {"k",
         [](Config&, PendingNoise& n, std::string_view v) {
             n.ks.clear();
             for (auto part : split(v, ';')) n.ks.push_back(to_wavevector(part));
         }},
        {"seed",
         [](Config& c, PendingNoise&, std::string_view v) { c.sim.seed = to_integer<std::uint64_t>(v); }},
        {"advection", [](Config& c, PendingNoise&, std::string_view v) { c.sim.advection = to_bool(v); }},
        {"scheme",
         [](Config& c, PendingNoise&, std::string_view v) {
             if (v == "stratonovich_ssprk3")
                 c.sim.scheme = NoiseScheme::stratonovich_ssprk3;
             else if (v == "ito_euler")
                 c.sim.scheme = NoiseScheme::ito_euler;
             else
                 throw ConfigError("unknown scheme '" + std::string(v) + "'");
         }},
        {"snapshot_stride",
         [](Config& c, PendingNoise&, std::string_view v) {
             c.sim.snapshot_stride = to_integer<std::size_t>(v);
         }},
        {"cfl_warning", [](Config& c, PendingNoise&, std::string_view v) { c.sim.cfl_warning = to_double(v); }},
        {"spinup_t_end",
         [](Config& c, PendingNoise&, std::string_view v) { c.spinup.duration = to_double(v); }},
        {"spinup_dt", [](Config& c, PendingNoise&, std::string_view v) { c.spinup.dt = to_double(v); }},
        {"spinup_alpha", [](Config& c, PendingNoise&, std::string_view v) { c.spinup.alpha = to_double(v); }},
        {"spinup_blowup_factor",
         [](Config& c, PendingNoise&, std::string_view v) { c.spinup.blowup_factor = to_double(v); }},
        {"initial_state",
         [](Config& c, PendingNoise&, std::string_view v) { c.initial_state = std::string(v); }},
        {"n_list",
         [](Config& c, PendingNoise&, std::string_view v) {
             c.n_list.clear();
             for (auto part : split(v, ',')) c.n_list.push_back(to_integer<std::size_t>(part));
         }},
        {"energy_route", [](Config& c, PendingNoise&, std::string_view v) { c.energy_route = to_bool(v); }},
        {"delta_list",
         [](Config& c, PendingNoise&, std::string_view v) {
             c.delta_list.clear();
             for (auto part : split(v, ',')) c.delta_list.push_back(to_double(part));
         }},
        {"perturbation_k",
         [](Config& c, PendingNoise&, std::string_view v) { c.perturbation_k = to_wavevector(v); }},
        {"robustness_dt", [](Config& c, PendingNoise&, std::string_view v) { c.robustness_dt = to_double(v); }},
        {"robustness_t_end",
         [](Config& c, PendingNoise&, std::string_view v) { c.robustness_t_end = to_double(v); }},
        {"ensemble_size",
         [](Config& c, PendingNoise&, std::string_view v) { c.ensemble_size = to_integer<std::size_t>(v); }},
        {"gronwall_p", [](Config& c, PendingNoise&, std::string_view v) { c.gronwall.p = to_double(v); }},
        {"gronwall_k",
         [](Config& c, PendingNoise&, std::string_view v) { c.gronwall.sobolev_order = to_integer<int>(v); }},
        {"gronwall_c1", [](Config& c, PendingNoise&, std::string_view v) { c.gronwall.c1 = to_double(v); }},
        {"gronwall_c2", [](Config& c, PendingNoise&, std::string_view v) { c.gronwall.c2 = to_double(v); }},
        {"output_dir", [](Config& c, PendingNoise&, std::string_view v) { c.output_dir = std::string(v); }},
    };
    return table;
}

void check_consistency(const Config& c) {
    c.sim.validate();
    SimParams spin = c.sim;
    spin.dt = c.spinup.dt;
    spin.t_end = c.spinup.duration;
    spin.snapshot_stride = 1;
    try {
        spin.steps();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("spin-up: ") + e.what());
    }
    SimParams robust = c.sim;
    robust.dt = c.robustness_dt;
    robust.t_end = c.robustness_t_end;
    robust.snapshot_stride = 1;
    try {
        robust.steps();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("robustness: ") + e.what());
    }
    require_resolvable(c.perturbation_k, c.sim.grid);
    for (std::size_t n : c.n_list)
        if (n == 0) throw ConfigError("n_list entries must be positive");
    if (c.ensemble_size == 0) throw ConfigError("ensemble_size must be >= 1");
    if (c.gronwall.sobolev_order < 0) throw ConfigError("gronwall_k must be >= 0");
    if (c.gronwall.p < 2.0) throw ConfigError("gronwall_p must be >= 2");
}

}  // namespace

Config parse_config(std::string_view text) {
    Config config;
    PendingNoise noise;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
        ++line_no;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        try {
            it->second(config, noise, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + " (" + std::string(key) + "): " + e.what());
        }
    }

    if (noise.ks.size() != noise.alphas.size())
        throw ConfigError("k lists " + std::to_string(noise.ks.size()) + " modes but alpha lists " +
                          std::to_string(noise.alphas.size()));
    std::vector<NoiseMode> modes;
    for (std::size_t i = 0; i < noise.ks.size(); ++i) modes.push_back({noise.ks[i], noise.alphas[i]});
    try {
        config.sim.noise = NoiseModel(std::move(modes));
        check_consistency(config);
    } catch (const DimensionError& e) {
        throw ConfigError(e.what());
    }
    return config;
}

std::string render_config(const Config& c) {
    std::ostringstream out;
    const auto& modes = c.sim.noise.modes();
    out << "grid_n=" << c.sim.grid.n() << "\n"
        << "dt=" << fmt(c.sim.dt) << "\n"
        << "t_end=" << fmt(c.sim.t_end) << "\n"
        << "damping=" << fmt(c.sim.damping) << "\n"
        << "forcing_amplitude=" << fmt(c.sim.forcing_amplitude) << "\n"
        << "k=" << join(modes, ";", [](const NoiseMode& m) { return fmt(m.k); }) << "\n"
        << "alpha=" << join(modes, ",", [](const NoiseMode& m) { return fmt(m.alpha); }) << "\n"
        << "seed=" << c.sim.seed << "\n"
        << "advection=" << (c.sim.advection ? "true" : "false") << "\n"
        << "scheme=" << scheme_name(c.sim.scheme) << "\n"
        << "snapshot_stride=" << c.sim.snapshot_stride << "\n"
        << "cfl_warning=" << fmt(c.sim.cfl_warning) << "\n"
        << "spinup_t_end=" << fmt(c.spinup.duration) << "\n"
        << "spinup_dt=" << fmt(c.spinup.dt) << "\n"
        << "spinup_alpha=" << fmt(c.spinup.alpha) << "\n"
        << "spinup_blowup_factor=" << fmt(c.spinup.blowup_factor) << "\n"
        << "initial_state=" << c.initial_state << "\n"
        << "n_list=" << join(c.n_list, ",", [](std::size_t n) { return std::to_string(n); }) << "\n"
        << "energy_route=" << (c.energy_route ? "true" : "false") << "\n"
        << "delta_list=" << join(c.delta_list, ",", [](double d) { return fmt(d); }) << "\n"
        << "perturbation_k=" << fmt(c.perturbation_k) << "\n"
        << "robustness_dt=" << fmt(c.robustness_dt) << "\n"
        << "robustness_t_end=" << fmt(c.robustness_t_end) << "\n"
        << "ensemble_size=" << c.ensemble_size << "\n"
        << "gronwall_p=" << fmt(c.gronwall.p) << "\n"
        << "gronwall_k=" << c.gronwall.sobolev_order << "\n"
        << "gronwall_c1=" << fmt(c.gronwall.c1) << "\n"
        << "gronwall_c2=" << fmt(c.gronwall.c2) << "\n"
        << "output_dir=" << c.output_dir << "\n";
    return out.str();
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::filesystem::path resolve_output_dir(const Config& config) {
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv("SALT_OUTPUT_DIR"); env && *env) return env;
    return "salt_out";
}

}  // namespace salt
