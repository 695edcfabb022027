// Command-line driver: one experiment per invocation, CSV data plus a JSON
// manifest in the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holistic/holistic.hpp"

#ifndef HOLISTIC_VERSION
#define HOLISTIC_VERSION "unknown"
#endif

using namespace holistic;
using json = nlohmann::ordered_json;

namespace {

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class KeyType { Real, Integer, Boolean, Text, RealOrAuto };

struct KeySpec {
    std::string name;
    KeyType type;
    json fallback;
    std::string help;
};

// Every configuration key.  Flags use the same names in kebab-case.
const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> keys{
        {"experiment", KeyType::Text, "", "experiment name (must match the subcommand if given)"},
        {"r", KeyType::Real, 0.05, "bifurcation parameter"},
        {"gamma", KeyType::Real, 1.0, "inter-element coupling"},
        {"p", KeyType::Integer, 1, "rolls per element (h = 2 pi p)"},
        {"n_elements", KeyType::Integer, 16, "number of elements"},
        {"m_samples", KeyType::Integer, 32, "grid samples per element (power of two)"},
        {"dt", KeyType::Real, 0.05, "direct solver time step"},
        {"model_dt", KeyType::Real, 0.25, "amplitude model time step"},
        {"t_end", KeyType::Real, 100.0, "final time"},
        {"dealias", KeyType::Boolean, true, "two-thirds dealiasing in the spectral solver"},
        {"c_stab", KeyType::Real, 1.0, "walled solver requires dt <= c_stab * dx^2"},
        {"output_stride", KeyType::Integer, 100, "steps between emitted snapshots"},
        {"samples", KeyType::Integer, 10, "comparison times after t = 0"},
        {"boundary", KeyType::Text, "periodic", "periodic, even or odd (simulate-*)"},
        {"sign", KeyType::Text, "upper", "upper (even data) or lower (odd data) for boundary-*"},
        {"alpha", KeyType::Real, 0.0, "wall signal amplitude alpha, alpha(t) = alpha cos(omega t)"},
        {"beta", KeyType::Real, 0.0, "wall signal amplitude beta, beta(t) = beta cos(omega t)"},
        {"omega", KeyType::Real, 0.0, "angular frequency of the wall signals"},
        {"accel_threshold", KeyType::Real, 0.01, "warn when |alpha''| + |beta''| exceeds this"},
        {"initial", KeyType::Text, "modulated", "zero, uniform, modulated, random or mixed-wall"},
        {"amplitude", KeyType::RealOrAuto, nullptr, "initial amplitude scale (auto: sqrt(r/3))"},
        {"depth", KeyType::Real, 0.2, "modulation depth of the initial profile"},
        {"seed", KeyType::Integer, 0, "seed for random initial profiles"},
        {"k_min", KeyType::Real, 0.5, "dispersion: smallest wavenumber"},
        {"k_max", KeyType::Real, 1.5, "dispersion: largest wavenumber"},
        {"k_steps", KeyType::Integer, 21, "dispersion: number of wavenumbers"},
        {"eps0", KeyType::Real, 1e-6, "dispersion: seed amplitude"},
        {"r_ladder", KeyType::Text, "", "compare: comma-separated r values for a convergence ladder"},
        {"horizon", KeyType::Real, 10.0, "compare ladder: t_end = horizon / r"},
        {"profile_points", KeyType::Integer, 129, "boundary-profiles: samples across the element"},
        {"output_dir", KeyType::Text, "out", "directory for CSV and manifest"},
    };
    return keys;
}

const KeySpec* find_key(const std::string& name) {
    for (const auto& k : key_table())
        if (k.name == name) return &k;
    return nullptr;
}

std::string kebab(std::string s) {
    for (auto& c : s)
        if (c == '_') c = '-';
    return s;
}

const std::map<std::string, json>& experiment_defaults() {
    static const std::map<std::string, json> defaults{
        {"dispersion",
         {{"r", 0.1}, {"p", 5}, {"n_elements", 4}, {"m_samples", 64}, {"t_end", 20.0}, {"dt", 0.05}}},
        {"compare", {{"r", 0.02}, {"n_elements", 16}, {"t_end", 500.0}, {"dt", 0.25}}},
        {"boundary-select",
         {{"r", 0.05}, {"n_elements", 8}, {"t_end", 65.5}, {"model_dt", 0.1}, {"dt", 0.02},
          {"initial", "mixed-wall"}}},
        {"boundary-equilibrium",
         {{"r", 0.0}, {"alpha", 0.1}, {"t_end", 40000.0}, {"model_dt", 0.4}, {"initial", "zero"},
          {"output_stride", 1000}}},
        {"boundary-profiles", json::object()},
        {"simulate-direct", {{"t_end", 50.0}, {"dt", 0.05}, {"output_stride", 200}}},
        {"simulate-model", {{"t_end", 500.0}, {"output_stride", 100}}},
    };
    return defaults;
}

json coerce(const KeySpec& spec, const json& value) {
    switch (spec.type) {
        case KeyType::Real:
            if (value.is_number()) return value.get<double>();
            break;
        case KeyType::RealOrAuto:
            if (value.is_null() || value.is_number()) return value;
            if (value.is_string() && value.get<std::string>() == "auto") return nullptr;
            break;
        case KeyType::Integer:
            if (value.is_number_integer()) return value;
            if (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>())
                return static_cast<long long>(value.get<double>());
            break;
        case KeyType::Boolean:
            if (value.is_boolean()) return value;
            break;
        case KeyType::Text:
            if (value.is_string()) return value;
            break;
    }
    throw ValidationError("configuration key '" + spec.name + "' has the wrong type: " + value.dump());
}

json parse_flag(const KeySpec& spec, const std::string& text) {
    try {
        switch (spec.type) {
            case KeyType::Real: return std::stod(text);
            case KeyType::RealOrAuto: return text == "auto" ? json(nullptr) : json(std::stod(text));
            case KeyType::Integer: return std::stoll(text);
            case KeyType::Boolean:
                if (text == "true" || text == "1") return true;
                if (text == "false" || text == "0") return false;
                break;
            case KeyType::Text: return text;
        }
    } catch (const std::logic_error&) {
    }
    throw ValidationError("flag --" + kebab(spec.name) + " cannot parse '" + text + "'");
}

// Resolved configuration with typed accessors.
struct Config {
    json values;

    [[nodiscard]] double real(const std::string& k) const { return values.at(k).get<double>(); }
    [[nodiscard]] long long integer(const std::string& k) const { return values.at(k).get<long long>(); }
    [[nodiscard]] std::string text(const std::string& k) const { return values.at(k).get<std::string>(); }
    [[nodiscard]] bool boolean(const std::string& k) const { return values.at(k).get<bool>(); }

    [[nodiscard]] std::size_t count(const std::string& k) const {
        const auto v = integer(k);
        if (v < 0) throw ValidationError("'" + k + "' must be non-negative");
        return static_cast<std::size_t>(v);
    }
};

ModelParams params_from(const Config& c) {
    const auto p = c.integer("p");
    if (p < 1 || p > 1000) throw ValidationError("'p' must be a positive integer");
    return make_params(c.real("r"), c.real("gamma"), static_cast<int>(p), c.count("n_elements"),
                       c.count("m_samples"));
}

SignChoice sign_from(const Config& c) {
    const auto s = c.text("sign");
    if (s == "upper") return SignChoice::Upper;
    if (s == "lower") return SignChoice::Lower;
    throw ValidationError("'sign' must be upper or lower, got '" + s + "'");
}

BoundaryKind boundary_from(const Config& c) {
    const auto s = c.text("boundary");
    if (s == "periodic") return BoundaryKind::Periodic;
    if (s == "even") return BoundaryKind::EvenGiven;
    if (s == "odd") return BoundaryKind::OddGiven;
    throw ValidationError("'boundary' must be periodic, even or odd, got '" + s + "'");
}

BoundaryForcing forcing_from(const Config& c, const ModelParams& params, BoundaryKind kind) {
    if (kind == BoundaryKind::Periodic) return BoundaryForcing::periodic();
    const double alpha = c.real("alpha"), beta = c.real("beta"), omega = c.real("omega");
    return BoundaryForcing::walls(kind, params, [alpha, omega](double t) { return alpha * std::cos(omega * t); },
                                  [beta, omega](double t) { return beta * std::cos(omega * t); });
}

// Largest |alpha''| + |beta''| by central differences on a grid of step dt.
void warn_if_fast_forcing(const Config& c, const BoundaryForcing& forcing, double t_end, double dt) {
    if (forcing.is_periodic()) return;
    const auto steps = std::min<std::size_t>(100000, static_cast<std::size_t>(std::ceil(t_end / dt)));
    double worst = 0.0;
    for (std::size_t i = 1; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        auto acc = [&](const TimeSignal& f) {
            return std::abs(f(t + dt) - 2.0 * f(t) + f(t - dt)) / (dt * dt);
        };
        worst = std::max(worst, acc(forcing.alpha) + acc(forcing.beta));
    }
    if (worst > c.real("accel_threshold"))
        std::cerr << "warning: wall signals vary quickly (|alpha''| + |beta''| ~ " << worst
                  << " > " << c.real("accel_threshold")
                  << "); the amplitude model assumes slowly varying forcing\n";
}

double auto_amplitude(const Config& c, double r, double fallback_scale) {
    if (!c.values.at("amplitude").is_null()) return c.real("amplitude");
    return fallback_scale * std::sqrt(std::max(r, 0.0) / 3.0);
}

ComplexVector initial_profile(const Config& c, const ModelParams& params, SignChoice sign) {
    const std::size_t n = params.n_elements;
    const auto kind = c.text("initial");
    const double depth = c.real("depth");
    ComplexVector a(n);
    if (kind == "zero") return a;
    if (kind == "uniform") {
        std::fill(a.begin(), a.end(), Complex(auto_amplitude(c, params.r, 1.0), 0.0));
        return a;
    }
    if (kind == "modulated") {
        const double amp = auto_amplitude(c, params.r, 1.0);
        for (std::size_t j = 0; j < n; ++j)
            a[j] = amp * (1.0 + depth * std::cos(two_pi * static_cast<double>(j + 1) / static_cast<double>(n)));
        return a;
    }
    if (kind == "random") {
        const double amp = auto_amplitude(c, params.r, 1.0);
        std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("seed")));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& z : a) {
            const double mag = amp * (1.0 + depth * u(rng));
            z = mag * std::exp(I * (M_PI * depth * u(rng)));
        }
        return a;
    }
    if (kind == "mixed-wall") {
        const double amp = auto_amplitude(c, params.r, 0.5);
        std::fill(a.begin(), a.end(), sign == SignChoice::Upper ? Complex(0.0, amp) : Complex(amp, 0.0));
        a[0] = amp * std::exp(I * (M_PI / 4.0));
        return a;
    }
    throw ValidationError("'initial' must be zero, uniform, modulated, random or mixed-wall, got '" +
                          kind + "'");
}

std::string num(double v) {
    if (v == 0.0) v = 0.0;  // no "-0" in the output
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw ValidationError("cannot open " + path.string() + " for writing");
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(num(v));
        row(s);
    }

private:
    std::ofstream out_;
};

struct RunContext {
    Config config;
    std::filesystem::path csv;
    json results = json::object();
};

void run_dispersion(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto steps = c.count("k_steps");
    if (steps < 1) throw ValidationError("'k_steps' must be at least 1");
    CsvWriter csv(ctx.csv, {"k", "lambda_theory", "lambda_measured"});
    double worst = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        const double k = steps == 1 ? c.real("k_min")
                                    : c.real("k_min") + (c.real("k_max") - c.real("k_min")) *
                                                            static_cast<double>(i) /
                                                            static_cast<double>(steps - 1);
        const double theory = she_growth_rate(k, params.r);
        const double measured = measure_growth_rate(params, k, c.real("eps0"), c.real("t_end"), c.real("dt"));
        worst = std::max(worst, std::abs(theory - measured));
        csv.row(std::vector<double>{k, theory, measured});
    }
    ctx.results["max_abs_deviation"] = worst;
}

void write_report(CsvWriter& csv, const ComparisonReport& report, std::size_t n) {
    for (std::size_t s = 0; s < report.times.size(); ++s)
        for (std::size_t j = 0; j < n; ++j)
            csv.row(std::vector<double>{report.times[s], static_cast<double>(j + 1),
                                        report.model_amplitudes[s][j].real(),
                                        report.model_amplitudes[s][j].imag(),
                                        report.oracle_amplitudes[s][j].real(),
                                        report.oracle_amplitudes[s][j].imag(), report.sup_error[s]});
}

std::vector<double> parse_ladder(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::logic_error&) {
            throw ValidationError("'r_ladder' entry '" + item + "' is not a number");
        }
    }
    return out;
}

void run_compare(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    ComparisonConfig config{params, initial_profile(c, params, SignChoice::Upper), c.real("t_end")};
    config.model_dt = c.real("model_dt");
    config.oracle_dt = c.real("dt");
    config.samples = c.count("samples");
    const auto ladder_text = c.text("r_ladder");
    if (ladder_text.empty()) {
        const auto report = compare_model_vs_direct(config);
        CsvWriter csv(ctx.csv, {"t", "element", "model_re", "model_im", "oracle_re", "oracle_im", "sup_error"});
        write_report(csv, report, params.n_elements);
        ctx.results["terminal_sup_error"] = report.terminal_error();
        ctx.results["outside_validity"] = report.outside_validity;
        return;
    }
    const auto rs = parse_ladder(ladder_text);
    const auto kind = c.text("initial");
    ProfileFn profile = [&](double r, std::size_t) {
        ModelParams rung = params;
        rung.r = r;
        return initial_profile(c, rung, SignChoice::Upper);
    };
    const auto ladder = convergence_ladder(config, rs, profile, c.real("horizon"));
    CsvWriter csv(ctx.csv, {"r", "t_end", "terminal_sup_error", "normalised_error"});
    bool outside = false;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        csv.row(std::vector<double>{ladder.rs[i], c.real("horizon") / ladder.rs[i],
                                    ladder.reports[i].terminal_error(), ladder.normalised_errors[i]});
        outside = outside || ladder.reports[i].outside_validity;
    }
    ctx.results["convergence_slope"] = ladder.slope;
    ctx.results["outside_validity"] = outside;
    ctx.results["initial"] = kind;
}

void run_boundary_select(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto sign = sign_from(c);
    const auto forcing = forcing_from(c, params, kind_for(sign));
    warn_if_fast_forcing(c, forcing, c.real("t_end"), c.real("model_dt"));
    const auto initial = AmplitudeState::real_sector(0.0, initial_profile(c, params, sign));
    const auto traj = run_model(initial, params, forcing, c.real("t_end"), c.real("model_dt"),
                                std::max<std::size_t>(1, c.count("output_stride")));
    CsvWriter csv(ctx.csv, {"t", "re_a1", "im_a1", "abs_a1", "phase_deg"});
    for (const auto& s : traj.samples)
        csv.row(std::vector<double>{s.t, s.a[0].real(), s.a[0].imag(), std::abs(s.a[0]),
                                    std::arg(s.a[0]) * 180.0 / M_PI});
    const auto& last = traj.final_state().a[0];
    const double off = sign == SignChoice::Upper ? std::abs(last.real()) : std::abs(last.imag());
    const auto lin = linearise_left_wall(params, sign);
    const auto rates = boundary_mode_rates(params, sign);
    ctx.results["final_off_phase_fraction"] = std::abs(last) > 0 ? off / std::abs(last) : 0.0;
    ctx.results["linearised_eigenvalues"] = {lin.eigenvalues[0], lin.eigenvalues[1]};
    ctx.results["predicted_rates"] = {{"fast", rates.fast}, {"slow", rates.slow}};
}

void run_boundary_equilibrium(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto sign = sign_from(c);
    const auto forcing = forcing_from(c, params, kind_for(sign));
    warn_if_fast_forcing(c, forcing, c.real("t_end"), c.real("model_dt"));
    const auto initial = AmplitudeState::real_sector(0.0, initial_profile(c, params, sign));
    const auto traj = run_model(initial, params, forcing, c.real("t_end"), c.real("model_dt"),
                                std::max<std::size_t>(1, c.count("output_stride")));
    const double predicted = boundary_equilibrium(params, c.real("alpha"), c.real("beta"));
    CsvWriter csv(ctx.csv, {"t", "re_a1", "im_a1", "predicted_re_a1"});
    for (const auto& s : traj.samples)
        csv.row(std::vector<double>{s.t, s.a[0].real(), s.a[0].imag(), predicted});
    const double steady = traj.final_state().a[0].real();
    ctx.results["steady_re_a1"] = steady;
    ctx.results["predicted_re_a1"] = predicted;
    ctx.results["relative_gap"] = predicted != 0.0 ? std::abs(steady - predicted) / std::abs(predicted)
                                                   : std::abs(steady);
}

void run_boundary_profiles(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto sign = sign_from(c);
    const auto points = c.count("profile_points");
    if (points < 2) throw ValidationError("'profile_points' must be at least 2");
    std::vector<double> xs(points);
    for (std::size_t i = 0; i < points; ++i)
        xs[i] = -0.5 * params.h + params.h * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto prof = boundary_profiles(params, sign, xs);
    CsvWriter csv(ctx.csv, {"x", "alpha_profile", "beta_profile", "alpha_profile_xx", "beta_profile_xx"});
    for (std::size_t i = 0; i < points; ++i)
        csv.row(std::vector<double>{xs[i] + 0.5 * params.h, prof.alpha[i], prof.beta[i], prof.alpha_xx[i],
                                    prof.beta_xx[i]});
}

void run_simulate_direct(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto kind = boundary_from(c);
    const auto forcing = forcing_from(c, params, kind);
    const SignChoice sign = kind == BoundaryKind::OddGiven ? SignChoice::Lower : SignChoice::Upper;
    warn_if_fast_forcing(c, forcing, c.real("t_end"), c.real("dt"));
    const auto initial = AmplitudeState::real_sector(0.0, initial_profile(c, params, sign));
    const auto seed = reconstruct_field(initial, params, forcing, params.gamma);
    SolverConfig config;
    config.dt = c.real("dt");
    config.t_end = c.real("t_end");
    config.dealias = c.boolean("dealias");
    config.c_stab = c.real("c_stab");
    config.scheme = forcing.is_periodic() ? Scheme::SpectralETD : Scheme::BoundedIMEX;
    CsvWriter csv(ctx.csv, {"t", "x", "u"});
    const auto final_grid = run_direct(seed, params, forcing, config,
                                       std::max<std::size_t>(1, c.count("output_stride")),
                                       [&](double t, const FieldGrid& g) {
                                           for (std::size_t i = 0; i < g.size(); ++i)
                                               csv.row(std::vector<double>{t, g.x(i), g.u[i]});
                                       });
    const auto amps = extract_amplitudes(final_grid, params, config.t_end);
    json a = json::array();
    for (const auto& z : amps.a) a.push_back({z.real(), z.imag()});
    ctx.results["final_amplitudes"] = a;
}

void run_simulate_model(RunContext& ctx) {
    const auto& c = ctx.config;
    const auto params = params_from(c);
    const auto kind = boundary_from(c);
    const auto forcing = forcing_from(c, params, kind);
    const SignChoice sign = kind == BoundaryKind::OddGiven ? SignChoice::Lower : SignChoice::Upper;
    warn_if_fast_forcing(c, forcing, c.real("t_end"), c.real("model_dt"));
    const auto initial = AmplitudeState::real_sector(0.0, initial_profile(c, params, sign));
    const auto traj = run_model(initial, params, forcing, c.real("t_end"), c.real("model_dt"),
                                std::max<std::size_t>(1, c.count("output_stride")));
    CsvWriter csv(ctx.csv, {"t", "element", "re_a", "im_a", "re_b", "im_b"});
    for (const auto& s : traj.samples)
        for (std::size_t j = 0; j < s.size(); ++j)
            csv.row(std::vector<double>{s.t, static_cast<double>(j + 1), s.a[j].real(), s.a[j].imag(),
                                        s.b[j].real(), s.b[j].imag()});
    ctx.results["reality_check"] = reality_check(traj.final_state());
}

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

json versions() {
    return {{"holistic", HOLISTIC_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"fftw", std::string(fftw_version)},
            {"cli11", CLI11_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

Config resolve(const std::string& experiment, const std::string& config_path,
               const std::map<std::string, std::string>& flags) {
    json values = json::object();
    for (const auto& k : key_table()) values[k.name] = k.fallback;
    for (const auto& [k, v] : experiment_defaults().at(experiment).items()) values[k] = v;

    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ValidationError("cannot read config file " + config_path);
        json file;
        try {
            file = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!file.is_object()) throw ValidationError("config file must hold a JSON object");
        for (const auto& [k, v] : file.items()) {
            const auto* spec = find_key(k);
            if (spec == nullptr) throw ValidationError("unknown configuration key '" + k + "'");
            values[k] = coerce(*spec, v);
        }
    }
    for (const auto& [k, text] : flags) values[k] = parse_flag(*find_key(k), text);

    const auto named = values["experiment"].get<std::string>();
    if (!named.empty() && named != experiment)
        throw ValidationError("config names experiment '" + named + "' but the command is '" + experiment + "'");
    values["experiment"] = experiment;
    return Config{values};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Holistic lattice model of the Swift-Hohenberg equation: experiments and data export"};
    app.set_version_flag("--version", HOLISTIC_VERSION);
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> experiments{
        {"dispersion", "measured versus predicted linear growth rates"},
        {"compare", "lattice model against the spectral oracle (optionally an r ladder)"},
        {"boundary-select", "phase selection of the wall amplitude"},
        {"boundary-equilibrium", "steady wall amplitude under constant forcing"},
        {"boundary-profiles", "subgrid structure of the wall element"},
        {"simulate-direct", "direct integration, field snapshots"},
        {"simulate-model", "lattice model trajectory"},
    };

    std::string config_path;
    std::map<std::string, std::string> flag_text;
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, description] : experiments) {
        auto* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "JSON configuration file; flags override its values");
        const auto& defaults = experiment_defaults().at(name);
        for (const auto& k : key_table()) {
            if (k.name == "experiment") continue;
            const json shown = defaults.contains(k.name) ? defaults.at(k.name) : k.fallback;
            sub->add_option_function<std::string>(
                   "--" + kebab(k.name), [&flag_text, key = k.name](const std::string& v) { flag_text[key] = v; },
                   k.help + " [default: " + (shown.is_null() ? std::string("auto") : shown.dump()) + "]")
                ->type_name(k.type == KeyType::Text ? "TEXT" : k.type == KeyType::Boolean ? "BOOL" : "NUMBER");
        }
        subs[name] = sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::string experiment;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) experiment = name;

    const auto start = std::chrono::steady_clock::now();
    try {
        RunContext ctx{resolve(experiment, config_path, flag_text), {}, json::object()};
        const std::filesystem::path dir = ctx.config.text("output_dir");
        std::filesystem::create_directories(dir);
        ctx.csv = dir / (experiment + "-" + utc_stamp() + ".csv");

        if (experiment == "dispersion") run_dispersion(ctx);
        else if (experiment == "compare") run_compare(ctx);
        else if (experiment == "boundary-select") run_boundary_select(ctx);
        else if (experiment == "boundary-equilibrium") run_boundary_equilibrium(ctx);
        else if (experiment == "boundary-profiles") run_boundary_profiles(ctx);
        else if (experiment == "simulate-direct") run_simulate_direct(ctx);
        else run_simulate_model(ctx);

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest{{"experiment", experiment},
                      {"csv", ctx.csv.filename().string()},
                      {"config", ctx.config.values},
                      {"versions", versions()},
                      {"rng", "mt19937_64"},
                      {"wall_time_seconds", wall},
                      {"results", ctx.results}};
        std::ofstream out(dir / "manifest.json");
        if (!out) throw ValidationError("cannot write manifest in " + dir.string());
        out << manifest.dump(2) << '\n';
        std::cout << ctx.csv.string() << '\n';
        return 0;
    } catch (const DivergenceError& e) {
        std::cerr << "error: numerical divergence: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
