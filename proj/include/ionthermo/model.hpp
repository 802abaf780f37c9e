// model.hpp — assembles chain, Hilbert space, Hamiltonian and initial state
// for one parameter point

#pragma once

#include "ionthermo/hilbert.hpp"
#include "ionthermo/ionchain.hpp"

#include <vector>

namespace ionthermo {

struct ModelParams {
    int N{1};
    int cutoff{20};
    double omega1{0.0};  // rad/us
    double Omega{0.0};   // rad/us
    double omega_z{0.0}; // rad/us
    double eta1{0.54};
    std::vector<double> nbar; // one per mode
    int spin_ion_index{1};
    Spin initial_spin{Spin::down};
    double weight_floor{0.0};
};

struct Model {
    IonChain chain;
    HilbertSpace space;
    HamiltonianMatrix hamiltonian;
    InitialMixture mixture;
};

HamiltonianParams hamiltonian_params(const IonChain& chain, double omega_z, double Omega);

// Validates, checks the memory budget, then builds everything.
Model build_model(const ModelParams& p, double budget_bytes = kDefaultBudgetBytes);

} // namespace ionthermo
