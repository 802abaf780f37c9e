// ionthermo.cpp — command-line front end: trace, sweep, scaling, modes

#include "ionthermo/errors.hpp"
#include "ionthermo/runner.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

enum Exit : int { ok = 0, config_error = 2, resource_error = 3, numerical_error = 4 };

// One JSON line on stderr so callers can parse the failure reason.
int fail(int code, const char* kind, const std::string& what, std::optional<std::uint64_t> bytes = std::nullopt) {
    nlohmann::json j = {{"error", kind}, {"message", what}, {"exit_code", code}};
    if (bytes) j["required_bytes"] = *bytes;
    std::cerr << j.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spin-phonon thermalization in trapped-ion chains: exact diagonalization runs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ionthermo::kVersion);

    std::string config_path, out_dir;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<double> budget_gib;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
        if (needs_config) opt->required();
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
        sub->add_option("--workers", workers, "worker threads, 0 = all cores (overrides workers)");
        sub->add_option("--seed", seed, "random seed (overrides seed)");
        sub->add_option("--budget-gib", budget_gib, "memory budget for dense matrices in GiB");
    };
    auto* trace = app.add_subcommand("trace", "time trace <sigma_z(t)> for one omega_z");
    auto* sweep = app.add_subcommand("sweep", "omega_z sweep with window statistics, ensembles and D_eff");
    auto* scaling = app.add_subcommand("scaling", "delta_infty versus IPR over a grid of instances");
    auto* modes = app.add_subcommand("modes", "equilibrium positions, normal modes and Lamb-Dicke parameters");
    add_common(trace, true);
    add_common(sweep, true);
    add_common(scaling, true);
    add_common(modes, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Exit::ok : Exit::config_error;
    }

    try {
        ionthermo::RunConfig cfg = config_path.empty() ? ionthermo::RunConfig{} : ionthermo::load_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (workers) cfg.workers = *workers;
        if (seed) cfg.seed = *seed;
        if (budget_gib) cfg.budget_gib = *budget_gib;
        ionthermo::validate(cfg);

        ionthermo::RunSummary sum;
        if (trace->parsed()) {
            sum = ionthermo::run_trace(cfg);
        } else if (sweep->parsed()) {
            sum = ionthermo::run_sweep(cfg);
        } else if (scaling->parsed()) {
            sum = ionthermo::run_scaling_study(cfg);
        } else {
            std::string report;
            sum = ionthermo::run_modes(cfg, &report);
            std::cout << report;
        }
        for (const auto& f : sum.written) std::cerr << "wrote " << f << '\n';
        if (sum.failed_rows > 0) std::cerr << sum.failed_rows << " of " << sum.rows << " rows failed\n";
        return Exit::ok;
    } catch (const ionthermo::ResourceError& e) {
        return fail(Exit::resource_error, "resource", e.what(), e.required_bytes());
    } catch (const ionthermo::NumericalError& e) {
        return fail(Exit::numerical_error, "numerical", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(Exit::config_error, "config", e.what());
    } catch (const std::bad_alloc&) {
        return fail(Exit::resource_error, "resource", "out of memory");
    } catch (const std::exception& e) {
        return fail(Exit::numerical_error, "numerical", e.what());
    }
}
