// ensembles.cpp — microcanonical and ETH machinery

#include "ionthermo/ensembles.hpp"

#include "ionthermo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ionthermo {

EnergyMoments energy_moments(const InitialMixture& mixture, const Eigen::MatrixXcd& h) {
    if (mixture.components.empty()) throw ConfigError("energy_moments: empty mixture");
    if (h.rows() != h.cols()) throw ConfigError("energy_moments: matrix must be square");
    double tr = 0.0, e1 = 0.0, e2 = 0.0;
    for (const auto& c : mixture.components) {
        if (c.index < 0 || c.index >= h.rows()) throw ConfigError("energy_moments: component outside the basis");
        tr += c.weight;
        e1 += c.weight * h(c.index, c.index).real();
        e2 += c.weight * h.col(c.index).squaredNorm(); // (H^2)_aa for Hermitian H
    }
    if (!(tr > 0.0)) throw ConfigError("energy_moments: mixture weights sum to zero");
    EnergyMoments m;
    m.trace = tr;
    m.mean = e1 / tr;
    const double second = e2 / tr;
    double var = second - m.mean * m.mean;
    if (var < -1e-12 * std::max(1.0, second)) throw NumericalError("energy_moments: negative variance", var);
    m.width = std::sqrt(std::max(var, 0.0));
    return m;
}

Eigen::VectorXd microcanonical_weights(const Eigen::VectorXd& energies, double mean, double width) {
    if (!(width > 0.0)) throw ConfigError("microcanonical_weights: width must be > 0");
    const double s = width / 2.0;
    const Eigen::ArrayXd logw = -((energies.array() - mean) / s).square();
    const double top = logw.maxCoeff();
    if (top < std::log(std::numeric_limits<double>::min())) {
        throw NumericalError("microcanonical average: every weight underflows (empty energy shell; "
                             "the energy width is small compared with the level spacing)");
    }
    Eigen::VectorXd w = (logw - top).exp().matrix();
    w /= w.sum();
    return w;
}

MicrocanonicalResult microcanonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& o_diag,
                                            double mean, double width) {
    if (energies.size() == 0 || energies.size() != o_diag.size()) throw ConfigError("microcanonical_average: size mismatch");
    MicrocanonicalResult r;
    r.mean = mean;
    r.width = width;
    Eigen::Index best = 0;
    (energies.array() - mean).abs().minCoeff(&best);
    r.nearest_index = best;
    if (!(width > 0.0)) {
        r.nearest_eigenstate = true;
        r.value = o_diag(best);
        r.participation = 1.0;
        return r;
    }
    const Eigen::VectorXd w = microcanonical_weights(energies, mean, width);
    r.value = w.dot(o_diag);
    r.participation = 1.0 / w.squaredNorm();
    return r;
}

MicrocanonicalResult microcanonical_average(const Spectrum& spectrum, double mean, double width, const Observable& op) {
    return microcanonical_average(spectrum.energies, eigenbasis_diagonal(spectrum, op), mean, width);
}

ShellWidth energy_shell_width(const Spectrum& spectrum, Eigen::Index alpha) {
    if (alpha < 0 || alpha >= spectrum.dim()) throw ConfigError("energy_shell_width: index out of range");
    const Eigen::VectorXd p = spectrum.populations(alpha);
    const double norm = p.sum();
    ShellWidth w;
    w.mean = p.dot(spectrum.energies) / norm;
    w.width = std::sqrt(p.dot((spectrum.energies.array() - w.mean).square().matrix()) / norm);
    return w;
}

DensityOfStates density_of_states(const Spectrum& spectrum, double bandwidth, int grid_points) {
    const Eigen::Index n = spectrum.dim();
    if (n == 0) throw ConfigError("density_of_states: empty spectrum");
    if (grid_points < 2) throw ConfigError("density_of_states: need at least two grid points");
    DensityOfStates d;
    const double lo = spectrum.energies.minCoeff();
    const double hi = spectrum.energies.maxCoeff();
    d.mean_spacing = n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0;
    d.bandwidth = bandwidth > 0.0 ? bandwidth : 3.0 * d.mean_spacing;
    if (!(d.bandwidth > 0.0)) throw ConfigError("density_of_states: bandwidth must be > 0 (degenerate spectrum)");
    const double a = lo - 5.0 * d.bandwidth;
    const double b = hi + 5.0 * d.bandwidth;
    const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * d.bandwidth);
    d.energies.resize(static_cast<std::size_t>(grid_points));
    d.density.assign(static_cast<std::size_t>(grid_points), 0.0);
    for (int g = 0; g < grid_points; ++g) {
        const double e = a + (b - a) * g / (grid_points - 1);
        d.energies[static_cast<std::size_t>(g)] = e;
        const double z = 1.0 / d.bandwidth;
        d.density[static_cast<std::size_t>(g)] =
            norm * ((spectrum.energies.array() - e) * z).square().unaryExpr([](double u) { return std::exp(-0.5 * u); }).sum();
    }
    return d;
}

double density_at(const DensityOfStates& dos, double energy) {
    const auto& x = dos.energies;
    if (x.size() < 2 || energy < x.front() || energy > x.back()) return 0.0;
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>((energy - x.front()) / h), x.size() - 2);
    const double f = (energy - x[k]) / h;
    return (1.0 - f) * dos.density[k] + f * dos.density[k + 1];
}

EthProfile eth_diagnostics(const Spectrum& spectrum, const Observable& op, const EthOptions& options,
                           const InitialMixture* mixture) {
    if (!(options.central_fraction > 0.0 && options.central_fraction <= 1.0)) throw ConfigError("eth_diagnostics: central fraction must lie in (0, 1]");
    if (options.omega_bins < 1) throw ConfigError("eth_diagnostics: need at least one bin");
    const Eigen::Index n = spectrum.dim();
    const Eigen::MatrixXcd o = to_eigenbasis(spectrum, op);

    EthProfile prof;
    prof.energies = spectrum.energies;
    prof.diagonal = o.diagonal().real();
    prof.dos = density_of_states(spectrum, options.dos_bandwidth);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r != c) prof.max_offdiagonal = std::max(prof.max_offdiagonal, std::abs(o(r, c)));
        }
    }

    const auto keep = static_cast<Eigen::Index>(std::llround(options.central_fraction * static_cast<double>(n)));
    const Eigen::Index lo = (n - keep) / 2;
    const Eigen::Index hi = lo + keep; // exclusive
    const double span = keep > 0 ? spectrum.energies(hi - 1) - spectrum.energies(lo) : 0.0;
    const double wmax = options.omega_max > 0.0 ? options.omega_max : std::max(span, std::numeric_limits<double>::min());
    const double bw = 2.0 * wmax / options.omega_bins;

    std::vector<double> sum(static_cast<std::size_t>(options.omega_bins), 0.0);
    std::vector<double> sum2(sum.size(), 0.0);
    std::vector<long> cnt(sum.size(), 0);
    double wsum = 0.0, w2sum = 0.0;
    // Pairs are kept when their mean energy lies in the central window; the
    // partner may sit anywhere, and (b1, b2) and (b2, b1) enter together.
    const double elo = keep > 0 ? spectrum.energies(lo) : 0.0;
    const double ehi = keep > 0 ? spectrum.energies(hi - 1) : -1.0;
    for (Eigen::Index b1 = 0; b1 < n; ++b1) {
        for (Eigen::Index b2 = 0; b2 < n; ++b2) {
            if (b1 == b2) continue;
            const double emid = 0.5 * (spectrum.energies(b1) + spectrum.energies(b2));
            if (emid < elo || emid > ehi) continue;
            const double omega = spectrum.energies(b1) - spectrum.energies(b2);
            const double m2 = std::norm(o(b1, b2));
            wsum += m2;
            w2sum += m2 * omega * omega;
            const auto k = static_cast<long>(std::floor((omega + wmax) / bw));
            if (k < 0 || k >= options.omega_bins) continue;
            const double v = m2 * density_at(prof.dos, emid);
            sum[static_cast<std::size_t>(k)] += v;
            sum2[static_cast<std::size_t>(k)] += v * v;
            ++cnt[static_cast<std::size_t>(k)];
        }
    }
    prof.profile_width = wsum > 0.0 ? std::sqrt(w2sum / wsum) : 0.0;
    for (int k = 0; k < options.omega_bins; ++k) {
        EthBin bin;
        const auto kk = static_cast<std::size_t>(k);
        bin.omega = -wmax + (k + 0.5) * bw;
        bin.count = cnt[kk];
        if (cnt[kk] > 0) {
            bin.mean = sum[kk] / static_cast<double>(cnt[kk]);
            if (cnt[kk] > 1) {
                const double var = std::max(0.0, (sum2[kk] - cnt[kk] * bin.mean * bin.mean) / static_cast<double>(cnt[kk] - 1));
                bin.std_error = std::sqrt(var / static_cast<double>(cnt[kk]));
            }
        }
        prof.bins.push_back(bin);
    }
    if (mixture != nullptr) {
        for (const auto& c : mixture->components) prof.shell_widths.push_back(energy_shell_width(spectrum, c.index).width);
    }
    return prof;
}

} // namespace ionthermo
