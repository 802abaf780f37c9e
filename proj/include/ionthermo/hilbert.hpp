// hilbert.hpp — truncated spin (x) Fock space, displacement operators,
// the spin-phonon Hamiltonian and thermal product initial states

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace ionthermo {

using cplx = std::complex<double>;

inline constexpr double kDefaultBudgetBytes = 8.0 * 1024.0 * 1024.0 * 1024.0;

enum class Spin : int { down = 0, up = 1 };

struct BasisState {
    Spin spin{Spin::down};
    std::vector<int> occupations; // n_1 .. n_N
};

// Flat index = s * (n_c+1)^N + sum_j n_j (n_c+1)^(N-j), mode 1 most significant.
class HilbertSpace {
public:
    HilbertSpace(int modes, int cutoff);

    int modes() const noexcept { return modes_; }
    int cutoff() const noexcept { return cutoff_; }
    Eigen::Index dim() const noexcept { return dim_; }
    Eigen::Index fock_dim() const noexcept { return fock_dim_; }

    Eigen::Index encode(const BasisState& s) const;
    BasisState decode(Eigen::Index index) const;

    Spin spin_of(Eigen::Index index) const noexcept { return index < fock_dim_ ? Spin::down : Spin::up; }
    int total_phonons(Eigen::Index index) const;

private:
    int modes_;
    int cutoff_;
    Eigen::Index fock_dim_;
    Eigen::Index dim_;
};

// Bytes held by one dense complex dim x dim matrix.
double dense_matrix_bytes(Eigen::Index dim);

// Throws ResourceError if a dense complex dim^2 matrix exceeds the budget.
HilbertSpace build_space(int modes, int cutoff, double budget_bytes = kDefaultBudgetBytes);

// exp[i eta (a + a^dagger)] on the truncated (n_c+1)-dimensional mode space,
// built by exponentiating the truncated quadrature, hence exactly unitary.
Eigen::MatrixXcd mode_displacement(int cutoff, double eta);

struct HamiltonianParams {
    double omega_z{0.0};           // rad/us
    double Omega{0.0};             // rad/us
    std::vector<double> mode_freqs;
    std::vector<double> etas;
};

struct HamiltonianMatrix {
    Eigen::MatrixXcd matrix;
    HamiltonianParams params;
    // Diagonal gauge P = diag(i^{sum_j n_j}) under which P^dagger H P is real.
    Eigen::VectorXcd gauge;
};

// H = (w_z/2) s_z + sum_j w_j n_j + (Omega/2)(s+ D + s- D^dagger), D = (x)_j D_j.
HamiltonianMatrix build_hamiltonian(const HilbertSpace& space, const HamiltonianParams& params);

// Uncoupled energies E0_alpha = +-w_z/2 + sum_j n_j w_j (sigma_z up = +1).
Eigen::VectorXd uncoupled_energies(const HilbertSpace& space, double omega_z, const std::vector<double>& mode_freqs);

// Basis indices ordered by E0, ties broken by flat index.
std::vector<Eigen::Index> energy_sorted_basis(const HilbertSpace& space, double omega_z,
                                              const std::vector<double>& mode_freqs);

struct MixtureComponent {
    double weight;
    Eigen::Index index;
};

struct InitialMixture {
    std::vector<MixtureComponent> components;
    Spin spin{Spin::down};
    std::vector<double> nbar;
    double truncated_trace{0.0}; // sum of weights, <= 1

    // Pure basis state with unit weight.
    static InitialMixture pure(Eigen::Index index, Spin spin = Spin::down);
};

// Thermal (geometric) phonon occupations times a pure spin state; keeps all
// in-cutoff components with w >= weight_floor * max w.
InitialMixture thermal_initial_state(const HilbertSpace& space, const std::vector<double>& nbar,
                                     Spin spin = Spin::down, double weight_floor = 0.0);

// Pauli operators on the spin factor, identity on the phonons.
Eigen::VectorXd sigma_z_diagonal(const HilbertSpace& space);
Eigen::MatrixXcd sigma_operator(const HilbertSpace& space, char axis);

} // namespace ionthermo
