// ensembles.hpp — energy moments, Gaussian microcanonical averages,
// energy-shell widths, density of states and ETH matrix-element profiles

#pragma once

#include "ionthermo/ed.hpp"
#include "ionthermo/hilbert.hpp"

#include <vector>

namespace ionthermo {

struct EnergyMoments {
    double mean{0.0};  // rad/us
    double width{0.0}; // standard deviation, rad/us
    double trace{0.0}; // tr(rho) of the truncated mixture
};

// Ebar = tr(rho H)/tr(rho), dE^2 = tr(rho H^2)/tr(rho) - Ebar^2 for a mixture
// diagonal in the product basis. Throws NumericalError on a variance below
// -1e-12 (relative to <H^2>).
EnergyMoments energy_moments(const InitialMixture& mixture, const Eigen::MatrixXcd& h);

struct MicrocanonicalResult {
    double value{0.0};
    double mean{0.0};
    double width{0.0};
    bool nearest_eigenstate{false}; // width <= 0 fallback was used
    Eigen::Index nearest_index{-1};
    double participation{0.0};      // 1 / sum P_beta^2
};

// Gaussian weights P_b ~ exp[-(E_b - Ebar)^2 / (dE/2)^2].
Eigen::VectorXd microcanonical_weights(const Eigen::VectorXd& energies, double mean, double width);

MicrocanonicalResult microcanonical_average(const Spectrum& spectrum, double mean, double width,
                                            const Observable& op);
// Same, with O_bb already available.
MicrocanonicalResult microcanonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& o_diag,
                                            double mean, double width);

struct ShellWidth {
    double mean{0.0};
    double width{0.0};
};

// Moments of E_beta under |c_beta(alpha)|^2.
ShellWidth energy_shell_width(const Spectrum& spectrum, Eigen::Index alpha);

struct DensityOfStates {
    std::vector<double> energies;
    std::vector<double> density; // states per rad/us
    double bandwidth{0.0};
    double mean_spacing{0.0};
};

// Gaussian-kernel smoothed level density on a uniform grid padded by five
// bandwidths. bandwidth <= 0 selects 3x the mean level spacing.
DensityOfStates density_of_states(const Spectrum& spectrum, double bandwidth = 0.0, int grid_points = 1024);

// Linear interpolation into a DOS grid, 0 outside.
double density_at(const DensityOfStates& dos, double energy);

struct EthOptions {
    double central_fraction{0.6}; // middle part of the spectrum, by level index; pairs by mean energy
    int omega_bins{41};           // odd keeps a bin centred on omega = 0
    double omega_max{0.0};        // <= 0: full span of the central window
    double dos_bandwidth{0.0};
};

struct EthBin {
    double omega{0.0};
    double mean{0.0};   // <|O_12|^2 D(E)>
    double std_error{0.0};
    long count{0};
};

struct EthProfile {
    Eigen::VectorXd energies;     // E_beta
    Eigen::VectorXd diagonal;     // O_beta beta
    std::vector<EthBin> bins;
    DensityOfStates dos;
    double profile_width{0.0};    // RMS omega weighted by |O_12|^2, central window
    double max_offdiagonal{0.0};  // max |O_12| over the whole spectrum
    std::vector<double> shell_widths; // W_alpha per mixture component (if given)
};

EthProfile eth_diagnostics(const Spectrum& spectrum, const Observable& op, const EthOptions& options = {},
                           const InitialMixture* mixture = nullptr);

} // namespace ionthermo
