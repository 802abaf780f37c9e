// runner.hpp — experiment orchestration behind the command-line tool

#pragma once

#include "ionthermo/config.hpp"
#include "ionthermo/ed.hpp"
#include "ionthermo/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ionthermo {

inline constexpr const char* kVersion = "1.0.0";

// Angular frequency setting the analysis time unit: Omega, or omega_1 when
// the drive is off (tau_S would be infinite).
double time_unit_frequency(double Omega, double omega1);

struct PointResult {
    double omega_z_MHz{0.0};
    Eigen::Index dim{0};
    double trace_trunc{0.0};
    TimeTrace trace;
    std::vector<double> damped;  // empty unless a decoherence rate is set
    std::vector<double> sampled; // empty unless repetitions are set
    WindowStats stats;           // on the sampled, else damped, else clean trace
    double mu_infty{0.0};
    double delta_infty{0.0};
    double mu_micro{0.0};
    double D_eff{0.0};     // at the configured cutoff
    double D_eff_err{0.0}; // |D1 - D2| / 4 from cutoffs n_c - 1 and n_c
    double D_eff_mean{0.0};
    double ipr_mean{0.0};
    double W_alpha_mean{0.0};
    std::string error;
};

// One parameter point; `seed` drives sampling and bootstrap.
PointResult evaluate_point(const RunConfig& cfg, double omega_z_MHz, std::uint64_t seed, bool with_ensembles = true);

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunSummary {
    std::vector<std::string> written; // paths, manifest first
    Eigen::Index dim{0};
    double trace_trunc{0.0};
    std::size_t rows{0};
    std::size_t failed_rows{0};
};

// In-memory renderers (also used by tests for determinism checks).
std::string render_trace_csv(const PointResult& p);
std::string render_sweep_csv(const std::vector<PointResult>& rows);

std::vector<PointResult> compute_sweep(const RunConfig& cfg);

RunSummary run_trace(const RunConfig& cfg);
RunSummary run_sweep(const RunConfig& cfg);
RunSummary run_scaling_study(const RunConfig& cfg);
// Equilibrium positions, mode frequencies and Lamb-Dicke parameters; also
// printed to stdout by the CLI.
RunSummary run_modes(const RunConfig& cfg, std::string* report = nullptr);

// Writes manifest.json (with SHA-256 of every file) and then the files.
std::vector<std::string> write_outputs(const std::string& dir, const std::string& command, const RunConfig& cfg,
                                       const std::vector<OutputFile>& files, const nlohmann::json& extra);

std::string sha256_hex(const std::string& data);
// %.17g, with "nan" / "inf" spelled out.
std::string format_double(double v);

} // namespace ionthermo
