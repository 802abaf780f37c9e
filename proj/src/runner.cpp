// runner.cpp — trace / sweep / scaling / modes pipelines and file emission

#include "ionthermo/runner.hpp"

#include "ionthermo/ensembles.hpp"
#include "ionthermo/ergodicity.hpp"
#include "ionthermo/errors.hpp"
#include "ionthermo/model.hpp"
#include "ionthermo/parallel.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace ionthermo {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ModelParams model_params(const RunConfig& cfg, double omega_z_MHz) {
    ModelParams p;
    p.N = cfg.N;
    p.cutoff = cfg.n_c;
    p.omega1 = kTwoPi * cfg.omega1_MHz;
    p.Omega = kTwoPi * cfg.Omega_MHz;
    p.omega_z = kTwoPi * omega_z_MHz;
    p.eta1 = cfg.eta1;
    p.nbar = cfg.nbar;
    p.spin_ion_index = cfg.spin_ion_index;
    p.weight_floor = cfg.weight_floor;
    return p;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void join(std::ostringstream& os, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) os << ',';
        os << c;
        first = false;
    }
    os << "\r\n";
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? kNaN : s / static_cast<double>(v.size());
}

json nan_safe(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

double time_unit_frequency(double Omega, double omega1) { return Omega > 0.0 ? Omega : omega1; }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

PointResult evaluate_point(const RunConfig& cfg, double omega_z_MHz, std::uint64_t seed, bool with_ensembles) {
    PointResult r;
    r.omega_z_MHz = omega_z_MHz;
    const Model m = build_model(model_params(cfg, omega_z_MHz), cfg.budget_bytes());
    r.dim = m.space.dim();
    r.trace_trunc = m.mixture.truncated_trace;

    const Spectrum s = diagonalize(m.hamiltonian);
    const Observable sz = Observable::from_diagonal(sigma_z_diagonal(m.space));
    const double w_unit = time_unit_frequency(m.hamiltonian.params.Omega, m.chain.omega1);
    const auto times = default_time_grid(w_unit, cfg.time_grid.transient_points, cfg.time_grid.window_points,
                                         cfg.time_grid.t_max_over_tauS);
    r.trace = evolve_expectation(s, m.mixture, sz, times);
    r.trace.tau_S = kTwoPi / w_unit;

    std::vector<double> measured = r.trace.values;
    if (cfg.gamma_dec_times_tauS) {
        r.damped = apply_decoherence(r.trace, *cfg.gamma_dec_times_tauS / r.trace.tau_S).values;
        measured = r.damped;
    }
    if (cfg.repetitions) {
        r.sampled = simulate_projective_sampling(measured, *cfg.repetitions, derive_seed(seed, 1));
        measured = r.sampled;
    }
    r.stats = bootstrap_uncertainty(r.trace.times, measured, default_window(r.trace.tau_S), cfg.resamples,
                                    derive_seed(seed, 2), 1);
    if (!with_ensembles) return r;

    r.mu_infty = diagonal_ensemble_average(s, m.mixture, sz).value;
    r.delta_infty = infinite_time_fluctuations(s, m.mixture, sz).value;
    const EnergyMoments em = energy_moments(m.mixture, m.hamiltonian.matrix);
    r.mu_micro = microcanonical_average(s, em.mean, em.width, sz).value;

    auto deff_of = [&](const Model& mm, const Spectrum& ss) {
        if (cfg.deff.mode == "windowed") {
            WindowOptions opt;
            opt.initial_window = cfg.deff.initial_window;
            opt.step = cfg.deff.step;
            opt.tolerance = cfg.deff.tolerance;
            const auto order = energy_sorted_basis(mm.space, mm.hamiltonian.params.omega_z, mm.hamiltonian.params.mode_freqs);
            return windowed_deff(mm.hamiltonian, order, mm.mixture, opt).component_ipr;
        }
        return component_iprs(ss, mm.mixture);
    };
    const std::vector<double> iprs = deff_of(m, s);
    r.D_eff = weighted_mean(m.mixture, iprs);
    r.ipr_mean = mean_of(iprs);
    if (cfg.n_c >= 2) {
        ModelParams lower = model_params(cfg, omega_z_MHz);
        lower.cutoff = cfg.n_c - 1;
        const Model ml = build_model(lower, cfg.budget_bytes());
        const Spectrum sl = cfg.deff.mode == "windowed" ? Spectrum{} : diagonalize(ml.hamiltonian);
        const double d_lower = weighted_mean(ml.mixture, deff_of(ml, sl));
        const TruncationEstimate t = truncation_uncertainty({{cfg.n_c - 1, d_lower}, {cfg.n_c, r.D_eff}});
        r.D_eff_err = t.sigma;
        r.D_eff_mean = t.mean;
    } else {
        r.D_eff_err = kNaN;
        r.D_eff_mean = kNaN;
    }
    std::vector<double> widths;
    widths.reserve(m.mixture.components.size());
    for (const auto& c : m.mixture.components) widths.push_back(energy_shell_width(s, c.index).width);
    r.W_alpha_mean = weighted_mean(m.mixture, widths);
    return r;
}

std::string render_trace_csv(const PointResult& p) {
    std::ostringstream os;
    const bool damped = !p.damped.empty();
    const bool sampled = !p.sampled.empty();
    std::string header = "t_us,t_over_tauS,sigma_z";
    if (damped) header += ",sigma_z_damped";
    if (sampled) header += ",sigma_z_sampled";
    os << header << "\r\n";
    for (std::size_t k = 0; k < p.trace.times.size(); ++k) {
        os << format_double(p.trace.times[k]) << ',' << format_double(p.trace.times[k] / p.trace.tau_S) << ','
           << format_double(p.trace.values[k]);
        if (damped) os << ',' << format_double(p.damped[k]);
        if (sampled) os << ',' << format_double(p.sampled[k]);
        os << "\r\n";
    }
    return os.str();
}

std::string render_sweep_csv(const std::vector<PointResult>& rows) {
    std::ostringstream os;
    join(os, {"omega_z", "mu_exp", "delta_exp", "mu_exp_err", "delta_exp_err", "mu_infty", "mu_micro", "D_eff",
              "D_eff_err", "ipr_mean", "W_alpha_mean", "trace_trunc", "error"});
    for (const auto& r : rows) {
        const bool ok = r.error.empty();
        auto f = [&](double v) { return format_double(ok ? v : kNaN); };
        join(os, {format_double(r.omega_z_MHz), f(r.stats.mu_exp), f(r.stats.delta_exp), f(r.stats.mu_exp_err),
                  f(r.stats.delta_exp_err), f(r.mu_infty), f(r.mu_micro), f(r.D_eff), f(r.D_eff_err), f(r.ipr_mean),
                  f(r.W_alpha_mean), f(r.trace_trunc), csv_field(r.error)});
    }
    return os.str();
}

std::vector<std::string> write_outputs(const std::string& dir, const std::string& command, const RunConfig& cfg,
                                       const std::vector<OutputFile>& files, const json& extra) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());

    json manifest;
    manifest["artifact"] = "ionthermo";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = to_json(cfg);
    manifest["generator"] = std::string(Philox4x32::algorithm_id);
    json outs = json::object();
    for (const auto& f : files) outs[f.name] = {{"sha256", sha256_hex(f.content)}, {"bytes", f.content.size()}};
    manifest["outputs"] = outs;
    for (const auto& [k, v] : extra.items()) manifest[k] = v;

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
        out.close();
        if (!out) throw std::runtime_error("failed to write '" + path.string() + "'");
        written.push_back(path.string());
    };
    emit("manifest.json", manifest.dump(2) + "\n");
    for (const auto& f : files) emit(f.name, f.content);
    return written;
}

RunSummary run_trace(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.is_sweep()) throw ConfigError("trace takes a single omega_z_MHz; use the sweep command for sweeps");
    const auto t0 = std::chrono::steady_clock::now();
    const PointResult p = evaluate_point(cfg, *cfg.omega_z_MHz, cfg.seed, false);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunSummary sum;
    sum.dim = p.dim;
    sum.trace_trunc = p.trace_trunc;
    sum.rows = p.trace.times.size();
    json extra = {{"dim", p.dim}, {"truncated_trace", p.trace_trunc}, {"timing_s", secs},
                  {"mu_exp", p.stats.mu_exp}, {"delta_exp", p.stats.delta_exp}};
    sum.written = write_outputs(cfg.output_dir, "trace", cfg, {{"trace.csv", render_trace_csv(p)}}, extra);
    return sum;
}

std::vector<PointResult> compute_sweep(const RunConfig& cfg) {
    validate(cfg);
    const std::vector<double> grid = cfg.is_sweep() ? cfg.omega_z_sweep->values() : std::vector<double>{*cfg.omega_z_MHz};
    // Budget and basic validation fail the whole run, not single rows.
    build_space(cfg.N, cfg.n_c, cfg.budget_bytes());
    std::vector<PointResult> rows(grid.size());
    parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
        try {
            rows[i] = evaluate_point(cfg, grid[i], derive_seed(cfg.seed, i), true);
        } catch (const ResourceError&) {
            throw;
        } catch (const std::exception& e) {
            rows[i] = PointResult{};
            rows[i].omega_z_MHz = grid[i];
            rows[i].error = e.what();
        }
    });
    return rows;
}

RunSummary run_sweep(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<PointResult> rows = compute_sweep(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunSummary sum;
    sum.rows = rows.size();
    for (const auto& r : rows) {
        if (!r.error.empty()) ++sum.failed_rows;
        else {
            sum.dim = r.dim;
            sum.trace_trunc = r.trace_trunc;
        }
    }
    json extra = {{"dim", sum.dim}, {"truncated_trace", sum.trace_trunc}, {"timing_s", secs},
                  {"rows", sum.rows}, {"failed_rows", sum.failed_rows}};
    sum.written = write_outputs(cfg.output_dir, "sweep", cfg, {{"sweep.csv", render_sweep_csv(rows)}}, extra);
    if (sum.failed_rows == sum.rows) throw NumericalError("sweep: every point failed (see sweep.csv)");
    return sum;
}

RunSummary run_scaling_study(const RunConfig& cfg) {
    validate(cfg);
    if (!cfg.scaling) throw ConfigError("scaling command needs a 'scaling' section in the config");
    const auto& g = *cfg.scaling;
    struct Meta {
        int N, n_c, phonons;
        double Omega_MHz, omega_z_MHz;
    };
    std::vector<ScalingInstance> grid;
    std::vector<Meta> meta;
    for (const auto& inst : g.instances) {
        const IonChain chain = make_ion_chain(inst.N, kTwoPi * cfg.omega1_MHz, cfg.eta1, std::min(cfg.spin_ion_index, inst.N));
        for (double ratio : g.omega_z_over_Omega.values()) {
            for (int ph : g.phonons) {
                const double wz = ratio * inst.Omega_MHz;
                ScalingInstance si;
                std::ostringstream id;
                id << "N" << inst.N << "_nc" << inst.n_c << "_wz" << std::setprecision(6) << ratio << "Omega_n" << ph;
                si.id = id.str();
                si.cutoff = inst.n_c;
                si.params = hamiltonian_params(chain, kTwoPi * wz, kTwoPi * inst.Omega_MHz);
                si.initial.spin = Spin::down;
                si.initial.occupations.assign(static_cast<std::size_t>(inst.N), ph);
                grid.push_back(si);
                meta.push_back({inst.N, inst.n_c, ph, inst.Omega_MHz, wz});
            }
        }
    }
    if (grid.size() < 3) throw ConfigError("scaling study needs at least three grid points");
    const auto t0 = std::chrono::steady_clock::now();
    const ScalingStudy st = fluctuation_scaling_study(grid, cfg.workers, cfg.budget_bytes());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream os;
    join(os, {"instance_id", "N", "n_c", "Omega_MHz", "omega_z_MHz", "phonons", "IPR", "D_eff", "delta_infty", "error"});
    RunSummary sum;
    for (std::size_t i = 0; i < st.rows.size(); ++i) {
        const auto& r = st.rows[i];
        const auto& mt = meta[i];
        if (!r.error.empty()) ++sum.failed_rows;
        join(os, {csv_field(r.id), std::to_string(mt.N), std::to_string(mt.n_c), format_double(mt.Omega_MHz),
                  format_double(mt.omega_z_MHz), std::to_string(mt.phonons), format_double(r.ipr),
                  format_double(r.D_eff), format_double(r.delta_infty), csv_field(r.error)});
    }
    sum.rows = st.rows.size();
    json fit = {{"x", "log(IPR)"},
                {"y", "log(delta_infty)"},
                {"slope", st.fit.slope},
                {"intercept", st.fit.intercept},
                {"slope_stderr", st.fit.slope_stderr},
                {"intercept_stderr", st.fit.intercept_stderr},
                {"points", st.fit.points},
                {"excluded", sum.failed_rows}};
    sum.written = write_outputs(cfg.output_dir, "scaling", cfg,
                                {{"scaling.csv", os.str()}, {"fit.json", fit.dump(2) + "\n"}},
                                {{"timing_s", secs}, {"rows", sum.rows}, {"failed_rows", sum.failed_rows}});
    return sum;
}

RunSummary run_modes(const RunConfig& cfg, std::string* report) {
    validate(cfg);
    const IonChain c = make_ion_chain(cfg.N, kTwoPi * cfg.omega1_MHz, cfg.eta1, cfg.spin_ion_index);
    json j;
    j["N"] = c.N;
    j["positions"] = c.positions;
    std::vector<double> mhz;
    for (double w : c.mode_freqs) mhz.push_back(w / kTwoPi);
    j["mode_freqs_MHz"] = mhz;
    j["frequency_ratios"] = c.frequency_ratios();
    j["spin_ion_index"] = c.spin_ion_index;
    j["eta1"] = c.eta1;
    j["etas"] = c.etas;
    std::vector<double> eff;
    for (std::size_t k = 0; k < c.etas.size(); ++k) eff.push_back(effective_lamb_dicke(c.etas[k], cfg.nbar[k]));
    j["etas_effective"] = eff;
    std::vector<std::vector<double>> vecs;
    for (Eigen::Index col = 0; col < c.mode_vectors.cols(); ++col) {
        std::vector<double> v(static_cast<std::size_t>(c.mode_vectors.rows()));
        for (Eigen::Index r = 0; r < c.mode_vectors.rows(); ++r) v[static_cast<std::size_t>(r)] = c.mode_vectors(r, col);
        vecs.push_back(v);
    }
    j["mode_vectors"] = vecs;
    j["revival_time_us"] = c.N >= 2 ? nan_safe(predict_revival_time(c.mode_freqs).tau_rev) : json(nullptr);
    const std::string text = j.dump(2) + "\n";
    if (report) *report = text;
    RunSummary sum;
    sum.rows = static_cast<std::size_t>(c.N);
    sum.written = write_outputs(cfg.output_dir, "modes", cfg, {{"modes.json", text}}, json::object());
    return sum;
}

} // namespace ionthermo
