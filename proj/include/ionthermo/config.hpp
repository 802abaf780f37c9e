// config.hpp — run configuration (JSON, MHz inputs) and its validation

#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ionthermo {

struct SweepSpec {
    double start{0.0};
    double stop{0.0};
    int count{1};

    std::vector<double> values() const; // uniform, endpoints included
};

struct TimeGridSpec {
    int transient_points{30};
    int window_points{100};
    double t_max_over_tauS{13.0};
};

struct DeffPolicy {
    std::string mode{"exact"}; // "exact" | "windowed"
    long initial_window{1000};
    long step{1000};
    double tolerance{0.01};
};

struct ScalingInstanceSpec {
    int N{1};
    int n_c{1};
    double Omega_MHz{0.0};
};

struct ScalingGridSpec {
    std::vector<ScalingInstanceSpec> instances;
    SweepSpec omega_z_over_Omega{0.25, 0.5, 6};
    std::vector<int> phonons{1, 2}; // n_j of the pure initial states, same on every mode
};

struct RunConfig {
    int N{1};
    int n_c{20};
    double omega1_MHz{0.724};
    double Omega_MHz{0.73};
    std::optional<double> omega_z_MHz{0.0}; // exactly one of omega_z_MHz / omega_z_sweep
    std::optional<SweepSpec> omega_z_sweep;
    double eta1{0.54};
    std::vector<double> nbar{0.8};
    int spin_ion_index{1};
    double weight_floor{0.0};
    TimeGridSpec time_grid;
    std::uint64_t seed{0};
    std::optional<int> repetitions;
    std::size_t resamples{100000};
    std::optional<double> gamma_dec_times_tauS;
    DeffPolicy deff;
    double budget_gib{8.0};
    int workers{1};
    std::string output_dir{"out"};
    std::optional<ScalingGridSpec> scaling;

    bool is_sweep() const noexcept { return omega_z_sweep.has_value(); }
    double budget_bytes() const noexcept { return budget_gib * 1024.0 * 1024.0 * 1024.0; }
};

// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

} // namespace ionthermo
