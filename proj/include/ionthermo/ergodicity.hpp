// ergodicity.hpp — inverse participation ratios, the effective dimension,
// band-window approximations and the fluctuation scaling study

#pragma once

#include "ionthermo/ed.hpp"
#include "ionthermo/hilbert.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ionthermo {

// 1 / sum_beta |c_beta(alpha)|^4
double ipr(const Spectrum& spectrum, Eigen::Index alpha);

// IPR of every mixture component, in component order.
std::vector<double> component_iprs(const Spectrum& spectrum, const InitialMixture& mixture);

// sum_alpha w~_alpha IPR(alpha), weights renormalized over the kept components.
double effective_dimension(const Spectrum& spectrum, const InitialMixture& mixture);

// Weighted mean of per-component values, weights renormalized; compensated sum.
double weighted_mean(const InitialMixture& mixture, const std::vector<double>& values);

struct WindowOptions {
    Eigen::Index initial_window{1000};
    Eigen::Index step{1000};
    double tolerance{0.01}; // relative change between successive windows
    int workers{1};
};

struct ErgodicityReport {
    std::vector<double> component_ipr;
    double D_eff{0.0};
    Eigen::Index window{0};      // N_states at termination
    double relative_change{0.0}; // between the last two windows; 0 if only one was evaluated
    bool full_window{false};     // the last window spanned the whole space (exact result)
    std::vector<std::pair<Eigen::Index, double>> history; // (N_states, D_eff)
};

// Approximates each component's IPR by diagonalizing an N_states x N_states
// block of H centred on the component in the uncoupled-energy ordering
// (clipped at the spectrum edges). N_states grows by `step` until D_eff
// changes by less than `tolerance`; reaching dim yields the exact value.
ErgodicityReport windowed_deff(const HamiltonianMatrix& h, const std::vector<Eigen::Index>& energy_order,
                               const InitialMixture& mixture, const WindowOptions& options = {});

struct TruncationEstimate {
    double D1{0.0};    // value at the largest cutoff
    double D2{0.0};    // linear extrapolation one cutoff step beyond
    double mean{0.0};  // (D1 + D2) / 2
    double sigma{0.0}; // |D1 - D2| / 4
};

// series: (cutoff, D_eff) with strictly ascending cutoffs, length >= 2.
TruncationEstimate truncation_uncertainty(const std::vector<std::pair<int, double>>& series);

struct LinearFit {
    double slope{0.0};
    double intercept{0.0};
    double slope_stderr{0.0};
    double intercept_stderr{0.0};
    std::size_t points{0};
};

// Ordinary least squares y = intercept + slope x. Standard errors need >= 3
// points and are 0 otherwise.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingInstance {
    std::string id;
    int cutoff{1};
    HamiltonianParams params;
    BasisState initial; // pure product state
};

struct ScalingRow {
    std::string id;
    double ipr{0.0};
    double D_eff{0.0};
    double delta_infty{0.0};
    std::string error; // empty when the row enters the fit
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    LinearFit fit; // log(delta_infty) against log(IPR)
};

// Full ED per instance, sigma_z fluctuations. Failed or zero-fluctuation rows
// are flagged and left out of the fit. Throws ConfigError when fewer than two
// usable rows remain or their IPRs coincide.
ScalingStudy fluctuation_scaling_study(const std::vector<ScalingInstance>& grid, int workers = 1,
                                       double budget_bytes = kDefaultBudgetBytes);

} // namespace ionthermo
