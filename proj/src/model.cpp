// model.cpp — one parameter point from physical inputs

#include "ionthermo/model.hpp"

#include "ionthermo/errors.hpp"

#include <cmath>

namespace ionthermo {

HamiltonianParams hamiltonian_params(const IonChain& chain, double omega_z, double Omega) {
    HamiltonianParams h;
    h.omega_z = omega_z;
    h.Omega = Omega;
    h.mode_freqs = chain.mode_freqs;
    h.etas = chain.etas;
    return h;
}

Model build_model(const ModelParams& p, double budget_bytes) {
    if (p.N < 1 || p.N > kMaxIons) throw ConfigError("N must lie in [1, " + std::to_string(kMaxIons) + "]");
    if (!(p.omega1 > 0.0) || !std::isfinite(p.omega1)) throw ConfigError("omega1 must be > 0");
    if (!(p.Omega >= 0.0) || !std::isfinite(p.Omega)) throw ConfigError("Omega must be >= 0");
    if (!std::isfinite(p.omega_z)) throw ConfigError("omega_z must be finite");
    if (!(p.eta1 >= 0.0) || !std::isfinite(p.eta1)) throw ConfigError("eta1 must be >= 0");
    if (static_cast<int>(p.nbar.size()) != p.N) throw ConfigError("nbar list length must equal N");
    HilbertSpace space = build_space(p.N, p.cutoff, budget_bytes);
    IonChain chain = make_ion_chain(p.N, p.omega1, p.eta1, p.spin_ion_index);
    HamiltonianMatrix h = build_hamiltonian(space, hamiltonian_params(chain, p.omega_z, p.Omega));
    InitialMixture mix = thermal_initial_state(space, p.nbar, p.initial_spin, p.weight_floor);
    return Model{std::move(chain), std::move(space), std::move(h), std::move(mix)};
}

} // namespace ionthermo
