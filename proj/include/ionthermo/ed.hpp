// ed.hpp — full exact diagonalization, eigenbasis time evolution and
// diagonal-ensemble (infinite-time) statistics

#pragma once

#include "ionthermo/hilbert.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ionthermo {

inline constexpr double kDefaultGapTolerance = 1e-9; // rad/us

// Eigenpairs of H. Eigenvectors are stored as V = diag(phases) * real_vectors
// whenever H is real in a diagonal phase gauge; otherwise complex_vectors
// holds V directly. Columns of V are |psi_beta> in the product basis, so
// c_beta(alpha) = <psi_beta|phi_alpha> = conj(V(alpha, beta)).
struct Spectrum {
    Eigen::VectorXd energies; // ascending
    Eigen::MatrixXd real_vectors;
    Eigen::VectorXcd phases;
    Eigen::MatrixXcd complex_vectors;
    double residual{0.0}; // max_beta |H v - E v| / |H|
    HamiltonianParams params;

    bool is_real() const noexcept { return complex_vectors.size() == 0; }
    Eigen::Index dim() const noexcept { return energies.size(); }

    cplx vector_element(Eigen::Index alpha, Eigen::Index beta) const;
    cplx coefficient(Eigen::Index alpha, Eigen::Index beta) const { return std::conj(vector_element(alpha, beta)); }
    Eigen::MatrixXcd vectors() const;
    // |c_beta(alpha)|^2 for all beta
    Eigen::VectorXd populations(Eigen::Index alpha) const;
};

// Observable in the product basis. Diagonal observables (sigma_z) skip the
// dense representation.
struct Observable {
    Eigen::VectorXd diagonal;
    Eigen::MatrixXcd dense;

    static Observable from_diagonal(Eigen::VectorXd d) { return {std::move(d), {}}; }
    static Observable from_matrix(Eigen::MatrixXcd m) { return {{}, std::move(m)}; }
    bool is_diagonal() const noexcept { return dense.size() == 0; }
    Eigen::Index dim() const noexcept { return is_diagonal() ? diagonal.size() : dense.rows(); }
};

Spectrum diagonalize(const HamiltonianMatrix& h);
Spectrum diagonalize(const Eigen::MatrixXcd& h);

// O_{b1 b2} = <psi_b1|O|psi_b2>
Eigen::MatrixXcd to_eigenbasis(const Spectrum& spectrum, const Observable& op);
// O_{bb} only
Eigen::VectorXd eigenbasis_diagonal(const Spectrum& spectrum, const Observable& op);
// rho_{b1 b2} = <psi_b1|rho(0)|psi_b2>, unnormalized (trace = truncated_trace)
Eigen::MatrixXcd mixture_in_eigenbasis(const Spectrum& spectrum, const InitialMixture& mixture);

struct TimeTrace {
    std::vector<double> times;      // us
    std::vector<double> values;     // divided by truncated_trace when normalized
    std::vector<double> raw_values; // plain tr(rho_trunc(t) O)
    double tau_S{0.0};              // 2 pi / Omega, us
    double truncated_trace{1.0};
    bool normalized{true};
    HamiltonianParams params;
};

// 30 points in [0, tau_S) and 100 in [tau_S, 13 tau_S] by default.
std::vector<double> default_time_grid(double Omega, int transient_points = 30, int window_points = 100,
                                      double t_max_over_tauS = 13.0);

// Evaluates tr(rho(t) O) in the eigenbasis. Precomputes M = rho o O^T once;
// each time point then costs one dim^2 contraction.
class ExpectationEvaluator {
public:
    ExpectationEvaluator(const Spectrum& spectrum, const InitialMixture& mixture, const Observable& op);

    // Raw (unnormalized) expectation values.
    std::vector<double> evaluate(const std::vector<double>& times) const;
    double truncated_trace() const noexcept { return trace_; }

private:
    Eigen::VectorXd energies_;
    Eigen::MatrixXcd weights_; // M_{12} = rho_{12} O_{21}
    double trace_;
};

TimeTrace evolve_expectation(const Spectrum& spectrum, const InitialMixture& mixture, const Observable& op,
                             const std::vector<double>& times, bool normalize = true);

struct DiagonalEnsembleResult {
    double value{0.0};     // normalized by the truncated trace
    double raw{0.0};
    double trace{0.0};     // sum_beta rho_bb
    long degenerate_pairs{0}; // off-diagonal pairs with |E1-E2| <= gap tolerance
};

// mu_inf = sum_b rho_bb O_bb, plus the coherent terms of exactly degenerate
// levels (|E1-E2| <= gap_tol), which are equally time-independent.
DiagonalEnsembleResult diagonal_ensemble_average(const Spectrum& spectrum, const InitialMixture& mixture,
                                                 const Observable& op, double gap_tol = kDefaultGapTolerance);

struct FluctuationResult {
    double value{0.0}; // delta_inf of the normalized expectation value
    double raw{0.0};
    long pair_count{0};            // pairs with gap > tol, counted once per +-gap
    long degenerate_gap_groups{0}; // gap groups holding more than one pair
    long zero_gap_pairs{0};
};

// delta_inf^2 = sum over distinct nonzero gaps of |sum_{pairs in gap} rho_12 O_21|^2.
// With nondegenerate gaps this is sum_{b1 != b2} |rho_12|^2 |O_12|^2.
FluctuationResult infinite_time_fluctuations(const Spectrum& spectrum, const InitialMixture& mixture,
                                             const Observable& op, double gap_tol = kDefaultGapTolerance);

// values * exp(-gamma t); gamma in 1/us
TimeTrace apply_decoherence(const TimeTrace& trace, double gamma);

struct RevivalEstimate {
    double tau_rev{0.0}; // us
    double mean_spacing{0.0};
    double min_spacing{0.0};
    double max_spacing{0.0};
};

// 2 pi / mean nearest-neighbour mode spacing. Order-of-magnitude only.
RevivalEstimate predict_revival_time(std::vector<double> mode_freqs);

} // namespace ionthermo
