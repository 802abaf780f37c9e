// config.cpp — JSON <-> RunConfig

#include "ionthermo/config.hpp"

#include "ionthermo/errors.hpp"
#include "ionthermo/ionchain.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace ionthermo {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

SweepSpec parse_sweep(const json& j, const std::string& where) {
    reject_unknown(j, {"start", "stop", "count"}, where);
    if (!j.contains("start") || !j.contains("stop") || !j.contains("count")) throw ConfigError(where + ": needs start, stop and count");
    SweepSpec s;
    read(j, "start", s.start);
    read(j, "stop", s.stop);
    read(j, "count", s.count);
    return s;
}

json sweep_json(const SweepSpec& s) { return {{"start", s.start}, {"stop", s.stop}, {"count", s.count}}; }

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

std::vector<double> SweepSpec::values() const {
    if (count < 1) throw ConfigError("sweep count must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = count == 1 ? start : start + (stop - start) * k / (count - 1);
    return v;
}

RunConfig parse_config(const json& j) {
    reject_unknown(j,
                   {"N", "n_c", "omega1_MHz", "Omega_MHz", "omega_z_MHz", "eta1", "nbar", "spin_ion_index",
                    "weight_floor", "time_grid", "seed", "repetitions", "resamples", "gamma_dec_times_tauS", "deff",
                    "budget_gib", "workers", "output_dir", "scaling"},
                   "config");
    RunConfig c;
    read(j, "N", c.N);
    read(j, "n_c", c.n_c);
    read(j, "omega1_MHz", c.omega1_MHz);
    read(j, "Omega_MHz", c.Omega_MHz);
    if (j.contains("omega_z_MHz")) {
        const json& w = j.at("omega_z_MHz");
        if (w.is_number()) {
            c.omega_z_MHz = w.get<double>();
        } else {
            c.omega_z_MHz.reset();
            c.omega_z_sweep = parse_sweep(w, "omega_z_MHz");
        }
    }
    read(j, "eta1", c.eta1);
    if (j.contains("nbar")) {
        const json& nb = j.at("nbar");
        if (nb.is_number()) c.nbar.assign(static_cast<std::size_t>(std::max(c.N, 0)), nb.get<double>());
        else read(j, "nbar", c.nbar);
    } else {
        c.nbar.assign(static_cast<std::size_t>(std::max(c.N, 0)), c.nbar.front());
    }
    read(j, "spin_ion_index", c.spin_ion_index);
    read(j, "weight_floor", c.weight_floor);
    if (j.contains("time_grid")) {
        const json& t = j.at("time_grid");
        reject_unknown(t, {"transient_points", "window_points", "t_max_over_tauS"}, "time_grid");
        read(t, "transient_points", c.time_grid.transient_points);
        read(t, "window_points", c.time_grid.window_points);
        read(t, "t_max_over_tauS", c.time_grid.t_max_over_tauS);
    }
    read(j, "seed", c.seed);
    if (j.contains("repetitions") && !j.at("repetitions").is_null()) {
        int r = 0;
        read(j, "repetitions", r);
        c.repetitions = r;
    }
    read(j, "resamples", c.resamples);
    if (j.contains("gamma_dec_times_tauS") && !j.at("gamma_dec_times_tauS").is_null()) {
        double g = 0.0;
        read(j, "gamma_dec_times_tauS", g);
        c.gamma_dec_times_tauS = g;
    }
    if (j.contains("deff")) {
        const json& d = j.at("deff");
        reject_unknown(d, {"mode", "initial_window", "step", "tolerance"}, "deff");
        read(d, "mode", c.deff.mode);
        read(d, "initial_window", c.deff.initial_window);
        read(d, "step", c.deff.step);
        read(d, "tolerance", c.deff.tolerance);
    }
    read(j, "budget_gib", c.budget_gib);
    read(j, "workers", c.workers);
    read(j, "output_dir", c.output_dir);
    if (j.contains("scaling") && !j.at("scaling").is_null()) {
        const json& s = j.at("scaling");
        reject_unknown(s, {"instances", "omega_z_over_Omega", "phonons"}, "scaling");
        ScalingGridSpec g;
        if (!s.contains("instances") || !s.at("instances").is_array()) throw ConfigError("scaling: 'instances' array required");
        for (const json& inst : s.at("instances")) {
            reject_unknown(inst, {"N", "n_c", "Omega_MHz"}, "scaling.instances");
            ScalingInstanceSpec is;
            read(inst, "N", is.N);
            read(inst, "n_c", is.n_c);
            read(inst, "Omega_MHz", is.Omega_MHz);
            g.instances.push_back(is);
        }
        if (s.contains("omega_z_over_Omega")) g.omega_z_over_Omega = parse_sweep(s.at("omega_z_over_Omega"), "scaling.omega_z_over_Omega");
        read(s, "phonons", g.phonons);
        c.scaling = g;
    }
    validate(c);
    return c;
}

void validate(const RunConfig& c) {
    require(c.N >= 1 && c.N <= kMaxIons, "N must lie in [1, " + std::to_string(kMaxIons) + "]");
    require(c.n_c >= 1, "n_c must be >= 1");
    require(c.omega1_MHz > 0.0 && std::isfinite(c.omega1_MHz), "omega1_MHz must be > 0");
    require(c.Omega_MHz >= 0.0 && std::isfinite(c.Omega_MHz), "Omega_MHz must be >= 0");
    require(c.omega_z_MHz.has_value() != c.omega_z_sweep.has_value(), "give omega_z_MHz as a number or a sweep object");
    if (c.omega_z_MHz) require(std::isfinite(*c.omega_z_MHz), "omega_z_MHz must be finite");
    if (c.omega_z_sweep) {
        require(c.omega_z_sweep->count >= 1, "sweep count must be >= 1");
        require(std::isfinite(c.omega_z_sweep->start) && std::isfinite(c.omega_z_sweep->stop), "sweep bounds must be finite");
    }
    require(c.eta1 >= 0.0 && std::isfinite(c.eta1), "eta1 must be >= 0");
    require(static_cast<int>(c.nbar.size()) == c.N, "nbar list length must equal N");
    for (double v : c.nbar) require(v >= 0.0 && std::isfinite(v), "nbar entries must be >= 0");
    require(c.spin_ion_index >= 1 && c.spin_ion_index <= c.N, "spin_ion_index must lie in [1, N]");
    require(c.weight_floor >= 0.0 && c.weight_floor < 1.0, "weight_floor must lie in [0, 1)");
    require(c.time_grid.transient_points >= 0, "time_grid.transient_points must be >= 0");
    require(c.time_grid.window_points >= 2, "time_grid.window_points must be >= 2");
    require(c.time_grid.t_max_over_tauS > 1.0, "time_grid.t_max_over_tauS must be > 1");
    if (c.repetitions) require(*c.repetitions >= 1, "repetitions must be >= 1");
    require(c.resamples >= 1, "resamples must be >= 1");
    if (c.gamma_dec_times_tauS) require(*c.gamma_dec_times_tauS >= 0.0, "gamma_dec_times_tauS must be >= 0");
    require(c.deff.mode == "exact" || c.deff.mode == "windowed", "deff.mode must be 'exact' or 'windowed'");
    require(c.deff.initial_window >= 2, "deff.initial_window must be >= 2");
    require(c.deff.step >= 1, "deff.step must be >= 1");
    require(c.deff.tolerance > 0.0, "deff.tolerance must be > 0");
    require(c.budget_gib > 0.0, "budget_gib must be > 0");
    require(c.workers >= 0, "workers must be >= 0 (0 = all cores)");
    if (c.scaling) {
        for (const auto& i : c.scaling->instances) {
            require(i.N >= 1 && i.N <= kMaxIons, "scaling instance N out of range");
            require(i.n_c >= 1, "scaling instance n_c must be >= 1");
            require(i.Omega_MHz > 0.0, "scaling instance Omega_MHz must be > 0");
            for (int p : c.scaling->phonons) require(p >= 0 && p <= i.n_c, "scaling phonon number outside the cutoff");
        }
        require(c.scaling->omega_z_over_Omega.count >= 1, "scaling sweep count must be >= 1");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json j;
    j["N"] = c.N;
    j["n_c"] = c.n_c;
    j["omega1_MHz"] = c.omega1_MHz;
    j["Omega_MHz"] = c.Omega_MHz;
    if (c.omega_z_sweep) j["omega_z_MHz"] = sweep_json(*c.omega_z_sweep);
    else j["omega_z_MHz"] = *c.omega_z_MHz;
    j["eta1"] = c.eta1;
    j["nbar"] = c.nbar;
    j["spin_ion_index"] = c.spin_ion_index;
    j["weight_floor"] = c.weight_floor;
    j["time_grid"] = {{"transient_points", c.time_grid.transient_points},
                      {"window_points", c.time_grid.window_points},
                      {"t_max_over_tauS", c.time_grid.t_max_over_tauS}};
    j["seed"] = c.seed;
    j["repetitions"] = c.repetitions ? json(*c.repetitions) : json(nullptr);
    j["resamples"] = c.resamples;
    j["gamma_dec_times_tauS"] = c.gamma_dec_times_tauS ? json(*c.gamma_dec_times_tauS) : json(nullptr);
    j["deff"] = {{"mode", c.deff.mode},
                 {"initial_window", c.deff.initial_window},
                 {"step", c.deff.step},
                 {"tolerance", c.deff.tolerance}};
    j["budget_gib"] = c.budget_gib;
    j["workers"] = c.workers;
    j["output_dir"] = c.output_dir;
    if (c.scaling) {
        json inst = json::array();
        for (const auto& i : c.scaling->instances) inst.push_back({{"N", i.N}, {"n_c", i.n_c}, {"Omega_MHz", i.Omega_MHz}});
        j["scaling"] = {{"instances", inst},
                        {"omega_z_over_Omega", sweep_json(c.scaling->omega_z_over_Omega)},
                        {"phonons", c.scaling->phonons}};
    } else {
        j["scaling"] = nullptr;
    }
    return j;
}

} // namespace ionthermo
