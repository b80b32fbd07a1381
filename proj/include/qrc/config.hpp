// config.hpp — Experiment configuration: strict line-oriented `key = value`
// files with [sections], flag overrides, and serialization. The serialized
// form doubles as the run manifest and can be fed back in unchanged.

#pragma once

#include "qrc/csv.hpp"
#include "qrc/errors.hpp"
#include "qrc/mixer.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qrc {

struct ExperimentConfig {
    // [experiment]
    std::string task = "sine_square";   // sine_square | mackey_glass
    std::string reservoir = "quantum";  // quantum | static | sto
    std::string output_dir = "results";
    int workers = 0;  // sweep worker pool; 0 = hardware concurrency

    // [mixer]
    double kappa_a = kTwoPi * 17e6;
    double kappa_b = kTwoPi * 21e6;
    double g = 0.0;  // 0 = task default (2*pi*5 MHz classification, 2*pi*20 MHz prediction)
    double eps0_a = 20e5;
    double eps0_b = 20e5;
    double segment = 100e-9;
    double dt = 0.05e-9;
    int cutoff_a = 7;
    int cutoff_b = 7;
    std::string dissipator = "joint";  // joint | separate
    bool calibrate = true;
    double calibration_target = 0.0;  // 0 = task default (0.85 classification, 0.5 prediction)
    double truncation_guard = 1e-3;   // 0 disables the edge check
    bool bias_row = true;

    // [readout]
    int max_na = 3;
    int max_nb = 3;
    double ridge = 0.0;
    double sv_cutoff = 1e-12;
    double threshold = 0.5;

    // [sine_square]
    int train_waveforms = 100;
    int test_waveforms = 100;
    std::uint64_t seed = 42;

    // [mackey_glass]
    int train_len = 1000;
    int test_len = 1000;
    int delay_min = 1;
    int delay_max = 100;
    double mg_beta = 0.2;
    double mg_gamma = 0.1;
    double mg_tau = 17.0;
    double mg_exponent = 10.0;
    double mg_step = 0.1;
    int mg_warmup = 1000;
    double mg_x0 = 1.2;

    // [static]
    int static_size = 40;
    std::uint64_t static_seed = 1;
    double input_scale = 1.0;
    double recurrent_scale = 0.1;
    bool literal_broadcast = false;

    // [sto]
    int sto_size = 24;
    std::uint64_t sto_seed = 1;
    double sto_gamma = 6e6;
    double sto_q = 2.0;
    double sto_sigma = 1.2e7;
    double sto_input_gain = 1.0;
    double sto_input_bias = 1.5;
    double sto_dt = 0.5e-9;
    double sto_p0 = 0.3;
    double sto_w_low = 0.5;
    double sto_w_high = 1.5;

    // [sweep]
    std::string sweep_axis = "neurons";  // neurons | g | kappa | delay
    std::vector<double> sweep_values;
    int sweep_seeds = 5;
    std::uint64_t sweep_base_seed = 1;

    double resolved_g() const {
        if (g > 0.0) return g;
        return task == "sine_square" ? kTwoPi * 5e6 : kTwoPi * 20e6;
    }

    double resolved_calibration_target() const {
        if (calibration_target > 0.0) return calibration_target;
        return task == "sine_square" ? 0.85 : 0.5;
    }

    double resolved_truncation_guard() const { return truncation_guard; }

    MixerConfig mixer() const {
        MixerConfig m;
        m.kappa_a = kappa_a;
        m.kappa_b = kappa_b;
        m.g = resolved_g();
        m.eps0_a = eps0_a;
        m.eps0_b = eps0_b;
        m.segment = segment;
        m.dt = dt;
        m.spec = FockSpec{cutoff_a, cutoff_b};
        if (dissipator == "joint") {
            m.dissipator_mode = DissipatorMode::Joint;
        } else if (dissipator == "separate") {
            m.dissipator_mode = DissipatorMode::Separate;
        } else {
            throw ConfigError("mixer.dissipator must be 'joint' or 'separate', got '" + dissipator + "'");
        }
        return m;
    }

    void validate() const {
        if (task != "sine_square" && task != "mackey_glass") {
            throw ConfigError("experiment.task must be sine_square or mackey_glass, got '" + task + "'");
        }
        if (reservoir != "quantum" && reservoir != "static" && reservoir != "sto") {
            throw ConfigError("experiment.reservoir must be quantum, static or sto, got '" + reservoir + "'");
        }
        if (sweep_axis != "neurons" && sweep_axis != "g" && sweep_axis != "kappa" &&
            sweep_axis != "delay") {
            throw ConfigError("sweep.axis must be neurons, g, kappa or delay, got '" + sweep_axis + "'");
        }
        mixer();  // checks the dissipator string
        if (train_waveforms < 1 || test_waveforms < 1 || train_len < 1 || test_len < 1) {
            throw ConfigError("dataset sizes must be positive");
        }
        if (delay_min < 0 || delay_max < delay_min) {
            throw ConfigError("mackey_glass delays must satisfy 0 <= delay_min <= delay_max");
        }
    }
};

// ------------------------------ key registry ---------------------------------

namespace detail {

struct ConfigKey {
    std::string section;
    std::string name;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_double(item));
    }
    return out;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

inline const std::vector<ConfigKey>& config_keys() {
    using C = ExperimentConfig;
    auto str = [](std::string C::* f, const char* sec, const char* name) {
        return ConfigKey{sec, name, [f](const C& c) { return c.*f; },
                         [f](C& c, const std::string& v) { c.*f = v; }};
    };
    auto dbl = [](double C::* f, const char* sec, const char* name) {
        return ConfigKey{sec, name, [f](const C& c) { return format_double(c.*f); },
                         [f](C& c, const std::string& v) { c.*f = parse_double(v); }};
    };
    auto integer = [](int C::* f, const char* sec, const char* name) {
        return ConfigKey{sec, name, [f](const C& c) { return std::to_string(c.*f); },
                         [f](C& c, const std::string& v) { c.*f = static_cast<int>(parse_double(v)); }};
    };
    auto u64 = [](std::uint64_t C::* f, const char* sec, const char* name) {
        return ConfigKey{sec, name, [f](const C& c) { return std::to_string(c.*f); },
                         [f](C& c, const std::string& v) {
                             c.*f = static_cast<std::uint64_t>(std::strtoull(v.c_str(), nullptr, 10));
                         }};
    };
    auto boolean = [](bool C::* f, const char* sec, const char* name) {
        return ConfigKey{sec, name, [f](const C& c) { return c.*f ? "true" : "false"; },
                         [f](C& c, const std::string& v) { c.*f = parse_bool(v); }};
    };
    static const std::vector<ConfigKey> keys = {
        str(&C::task, "experiment", "task"),
        str(&C::reservoir, "experiment", "reservoir"),
        str(&C::output_dir, "experiment", "output_dir"),
        integer(&C::workers, "experiment", "workers"),
        dbl(&C::kappa_a, "mixer", "kappa_a"),
        dbl(&C::kappa_b, "mixer", "kappa_b"),
        dbl(&C::g, "mixer", "g"),
        dbl(&C::eps0_a, "mixer", "eps0_a"),
        dbl(&C::eps0_b, "mixer", "eps0_b"),
        dbl(&C::segment, "mixer", "segment"),
        dbl(&C::dt, "mixer", "dt"),
        integer(&C::cutoff_a, "mixer", "cutoff_a"),
        integer(&C::cutoff_b, "mixer", "cutoff_b"),
        str(&C::dissipator, "mixer", "dissipator"),
        boolean(&C::calibrate, "mixer", "calibrate"),
        dbl(&C::calibration_target, "mixer", "calibration_target"),
        dbl(&C::truncation_guard, "mixer", "truncation_guard"),
        boolean(&C::bias_row, "mixer", "bias_row"),
        integer(&C::max_na, "readout", "max_na"),
        integer(&C::max_nb, "readout", "max_nb"),
        dbl(&C::ridge, "readout", "ridge"),
        dbl(&C::sv_cutoff, "readout", "sv_cutoff"),
        dbl(&C::threshold, "readout", "threshold"),
        integer(&C::train_waveforms, "sine_square", "train_waveforms"),
        integer(&C::test_waveforms, "sine_square", "test_waveforms"),
        u64(&C::seed, "sine_square", "seed"),
        integer(&C::train_len, "mackey_glass", "train_len"),
        integer(&C::test_len, "mackey_glass", "test_len"),
        integer(&C::delay_min, "mackey_glass", "delay_min"),
        integer(&C::delay_max, "mackey_glass", "delay_max"),
        dbl(&C::mg_beta, "mackey_glass", "beta"),
        dbl(&C::mg_gamma, "mackey_glass", "gamma"),
        dbl(&C::mg_tau, "mackey_glass", "tau"),
        dbl(&C::mg_exponent, "mackey_glass", "exponent"),
        dbl(&C::mg_step, "mackey_glass", "step"),
        integer(&C::mg_warmup, "mackey_glass", "warmup"),
        dbl(&C::mg_x0, "mackey_glass", "x0"),
        integer(&C::static_size, "static", "size"),
        u64(&C::static_seed, "static", "seed"),
        dbl(&C::input_scale, "static", "input_scale"),
        dbl(&C::recurrent_scale, "static", "recurrent_scale"),
        boolean(&C::literal_broadcast, "static", "literal_broadcast"),
        integer(&C::sto_size, "sto", "size"),
        u64(&C::sto_seed, "sto", "seed"),
        dbl(&C::sto_gamma, "sto", "gamma_damping"),
        dbl(&C::sto_q, "sto", "q"),
        dbl(&C::sto_sigma, "sto", "sigma"),
        dbl(&C::sto_input_gain, "sto", "input_gain"),
        dbl(&C::sto_input_bias, "sto", "input_bias"),
        dbl(&C::sto_dt, "sto", "dt"),
        dbl(&C::sto_p0, "sto", "p0"),
        dbl(&C::sto_w_low, "sto", "w_low"),
        dbl(&C::sto_w_high, "sto", "w_high"),
        str(&C::sweep_axis, "sweep", "axis"),
        ConfigKey{"sweep", "values",
                  [](const C& c) { return format_list(c.sweep_values); },
                  [](C& c, const std::string& v) { c.sweep_values = parse_list(v); }},
        integer(&C::sweep_seeds, "sweep", "seeds"),
        u64(&C::sweep_base_seed, "sweep", "base_seed"),
    };
    return keys;
}

inline const ConfigKey* find_key(const std::string& section, const std::string& name) {
    for (const ConfigKey& k : config_keys()) {
        if (k.section == section && k.name == name) return &k;
    }
    return nullptr;
}

inline std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

// Applies `section.key = value` lines to the config; unknown keys fail fast.
inline void apply_config_text(ExperimentConfig& config, const std::string& text,
                              const std::string& origin = "<config>") {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = detail::strip(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section '" + s + "'");
            }
            section = detail::strip(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value, got '" + s + "'");
        }
        const std::string key = detail::strip(s.substr(0, eq));
        const std::string value = detail::strip(s.substr(eq + 1));
        const detail::ConfigKey* ck = detail::find_key(section, key);
        if (ck == nullptr) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" +
                              (section.empty() ? key : section + "." + key) + "'");
        }
        try {
            ck->set(config, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

// Applies a single `section.key=value` override (CLI flags).
inline void apply_config_override(ExperimentConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like section.key=value, got '" + assignment + "'");
    }
    const std::string path = detail::strip(assignment.substr(0, eq));
    const std::string value = detail::strip(assignment.substr(eq + 1));
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        throw ConfigError("override key must be section.key, got '" + path + "'");
    }
    const detail::ConfigKey* ck = detail::find_key(path.substr(0, dot), path.substr(dot + 1));
    if (ck == nullptr) {
        throw ConfigError("unknown key '" + path + "'");
    }
    ck->set(config, value);
}

// Serializes every key grouped by section. With `resolved`, task-dependent
// sentinels (mixer.g = 0, mixer.calibration_target = 0) are written as their
// resolved values so the output reproduces the run verbatim.
inline std::string serialize_config(const ExperimentConfig& config, bool resolved = false) {
    ExperimentConfig copy = config;
    if (resolved) {
        copy.g = config.resolved_g();
        copy.calibration_target = config.resolved_calibration_target();
    }
    std::string out;
    std::string section;
    for (const detail::ConfigKey& k : detail::config_keys()) {
        if (k.section != section) {
            if (!out.empty()) out += '\n';
            section = k.section;
            out += "[" + section + "]\n";
        }
        out += k.name + " = " + k.get(copy) + "\n";
    }
    return out;
}

} // namespace qrc
