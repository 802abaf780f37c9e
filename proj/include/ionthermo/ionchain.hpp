// ionchain.hpp — equilibrium positions, axial normal modes and Lamb-Dicke
// parameters of a linear chain of equal-mass ions

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace ionthermo {

inline constexpr int kMaxIons = 8;

struct NormalModes {
    std::vector<double> freqs;  // angular, rad/us, ascending
    Eigen::MatrixXd vectors;    // column j is b_j; b_j(0) > 0 (first nonzero component positive)
};

struct IonChain {
    int N{1};
    double omega1{0.0};            // COM mode, rad/us
    std::vector<double> positions; // dimensionless, ascending
    std::vector<double> mode_freqs;
    Eigen::MatrixXd mode_vectors;
    int spin_ion_index{1};         // 1-based
    double eta1{0.0};
    std::vector<double> etas;

    // omega_j / omega_1
    std::vector<double> frequency_ratios() const;
};

// Solves u_i - sum_{k<i} 1/(u_i-u_k)^2 + sum_{k>i} 1/(u_k-u_i)^2 = 0 by damped
// Newton iteration. Throws NumericalError carrying the residual if the
// iteration cap is hit.
std::vector<double> equilibrium_positions(int N);

// Max-norm of the force-balance residual at the given coordinates.
double force_residual(const std::vector<double>& u);

// Dimensionless axial Hessian A_ik at the given equilibrium coordinates.
Eigen::MatrixXd axial_hessian(const std::vector<double>& u);

NormalModes normal_modes(int N, double omega1);

// eta_j = M_j sqrt(omega_1/omega_j) eta_1 with M_j = b_j(s)/b_1(s).
std::vector<double> lamb_dicke_parameters(const NormalModes& modes, double eta1, int spin_ion_index);

inline double effective_lamb_dicke(double eta, double nbar) { return eta * std::sqrt(2.0 * nbar + 1.0); }

IonChain make_ion_chain(int N, double omega1, double eta1, int spin_ion_index = 1);

} // namespace ionthermo
