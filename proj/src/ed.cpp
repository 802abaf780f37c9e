// ed.cpp — exact diagonalization and eigenbasis dynamics

#include "ionthermo/ed.hpp"

#include "ionthermo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

namespace ionthermo {

namespace {

double hermiticity_defect(const Eigen::MatrixXcd& h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

bool is_diagonal_matrix(const Eigen::MatrixXcd& h) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
            if (r != c && h(r, c) != cplx(0.0, 0.0)) return false;
        }
    }
    return true;
}

[[noreturn]] void solver_failure(Eigen::Index dim, double norm, const char* what) {
    std::ostringstream msg;
    msg << "diagonalize: " << what << " (dim " << dim << ", max|H_ij| " << norm << ")";
    throw NumericalError(msg.str());
}

// max_beta |H v_beta - E_beta v_beta|_2 / max|E|
template <class Mat>
double eigen_residual(const Mat& h, const Mat& v, const Eigen::VectorXd& e) {
    const double scale = std::max(e.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const Mat r = h * v - v * e.asDiagonal();
    return r.colwise().norm().maxCoeff() / scale;
}

Spectrum diagonalize_impl(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& gauge, const HamiltonianParams& params) {
    const Eigen::Index n = h.rows();
    if (n == 0 || h.cols() != n) throw ConfigError("diagonalize: matrix must be square and non-empty");
    const double norm = h.cwiseAbs().maxCoeff();
    if (hermiticity_defect(h) > 1e-12 * std::max(norm, 1.0)) throw ConfigError("diagonalize: matrix is not Hermitian");

    Spectrum s;
    s.params = params;
    s.phases = gauge.size() == n ? gauge : Eigen::VectorXcd::Ones(n);

    if (is_diagonal_matrix(h)) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        const Eigen::VectorXd d = h.diagonal().real();
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d(a) < d(b); });
        s.energies.resize(n);
        s.real_vectors = Eigen::MatrixXd::Zero(n, n);
        s.phases = Eigen::VectorXcd::Ones(n);
        for (Eigen::Index b = 0; b < n; ++b) {
            s.energies(b) = d(order[b]);
            s.real_vectors(order[b], b) = 1.0;
        }
        s.residual = 0.0;
        return s;
    }

    Eigen::MatrixXcd hg = s.phases.conjugate().asDiagonal() * h * s.phases.asDiagonal();
    if (hg.imag().cwiseAbs().maxCoeff() <= 1e-13 * std::max(norm, 1.0)) {
        const Eigen::MatrixXd hr = hg.real();
        hg.resize(0, 0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hr);
        if (es.info() != Eigen::Success) solver_failure(n, norm, "real symmetric eigensolver failed");
        s.energies = es.eigenvalues();
        s.real_vectors = es.eigenvectors();
        s.residual = eigen_residual(hr, s.real_vectors, s.energies);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.info() != Eigen::Success) solver_failure(n, norm, "complex Hermitian eigensolver failed");
        s.energies = es.eigenvalues();
        s.complex_vectors = es.eigenvectors();
        s.phases = Eigen::VectorXcd::Ones(n);
        s.residual = eigen_residual(h, s.complex_vectors, s.energies);
    }
    if (!(s.residual <= 1e-8)) {
        std::ostringstream msg;
        msg << "eigen residual " << s.residual << " exceeds 1e-8";
        solver_failure(n, norm, msg.str().c_str());
    }
    return s;
}

void check_dims(const Spectrum& spectrum, const Observable& op) {
    if (op.dim() != spectrum.dim()) throw ConfigError("observable dimension does not match the spectrum");
    if (!op.is_diagonal() && hermiticity_defect(op.dense) > 1e-12) throw ConfigError("observable is not Hermitian");
}

void check_mixture(const Spectrum& spectrum, const InitialMixture& mixture) {
    if (mixture.components.empty()) throw ConfigError("initial mixture is empty");
    for (const auto& c : mixture.components) {
        if (c.index < 0 || c.index >= spectrum.dim()) throw ConfigError("mixture component outside the basis");
    }
}

double mixture_trace(const InitialMixture& m) {
    double t = 0.0;
    for (const auto& c : m.components) t += c.weight;
    return t;
}

// <psi_b1|rho|psi_b2>
cplx mixture_element(const Spectrum& s, const InitialMixture& m, Eigen::Index b1, Eigen::Index b2) {
    cplx acc = 0.0;
    for (const auto& c : m.components) acc += c.weight * std::conj(s.vector_element(c.index, b1)) * s.vector_element(c.index, b2);
    return acc;
}

// <psi_b1|O|psi_b2>
cplx observable_element(const Spectrum& s, const Observable& op, Eigen::Index b1, Eigen::Index b2) {
    const Eigen::Index n = s.dim();
    Eigen::VectorXcd v1(n), v2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v1(i) = s.vector_element(i, b1);
        v2(i) = s.vector_element(i, b2);
    }
    if (op.is_diagonal()) return (v1.conjugate().array() * op.diagonal.array() * v2.array()).sum();
    return v1.dot(op.dense * v2);
}

} // namespace

cplx Spectrum::vector_element(Eigen::Index alpha, Eigen::Index beta) const {
    if (is_real()) return phases(alpha) * real_vectors(alpha, beta);
    return complex_vectors(alpha, beta);
}

Eigen::MatrixXcd Spectrum::vectors() const {
    if (is_real()) return phases.asDiagonal() * real_vectors.cast<cplx>();
    return complex_vectors;
}

Eigen::VectorXd Spectrum::populations(Eigen::Index alpha) const {
    if (is_real()) return real_vectors.row(alpha).transpose().array().square();
    return complex_vectors.row(alpha).transpose().cwiseAbs2();
}

Spectrum diagonalize(const HamiltonianMatrix& h) { return diagonalize_impl(h.matrix, h.gauge, h.params); }

Spectrum diagonalize(const Eigen::MatrixXcd& h) { return diagonalize_impl(h, {}, {}); }

Eigen::MatrixXcd to_eigenbasis(const Spectrum& spectrum, const Observable& op) {
    check_dims(spectrum, op);
    if (spectrum.is_real()) {
        const Eigen::MatrixXd& v = spectrum.real_vectors;
        if (op.is_diagonal()) {
            const Eigen::MatrixXd ov = op.diagonal.asDiagonal() * v;
            return (v.transpose() * ov).cast<cplx>();
        }
        const Eigen::MatrixXcd og = spectrum.phases.conjugate().asDiagonal() * op.dense * spectrum.phases.asDiagonal();
        const Eigen::MatrixXd re = og.real();
        const Eigen::MatrixXd im = og.imag();
        Eigen::MatrixXcd out = (v.transpose() * re * v).cast<cplx>();
        if (im.cwiseAbs().maxCoeff() > 0.0) out += cplx(0.0, 1.0) * (v.transpose() * im * v).cast<cplx>();
        return out;
    }
    const Eigen::MatrixXcd& v = spectrum.complex_vectors;
    if (op.is_diagonal()) return v.adjoint() * (op.diagonal.cast<cplx>().asDiagonal() * v);
    return v.adjoint() * op.dense * v;
}

Eigen::VectorXd eigenbasis_diagonal(const Spectrum& spectrum, const Observable& op) {
    check_dims(spectrum, op);
    if (op.is_diagonal()) {
        if (spectrum.is_real()) return spectrum.real_vectors.array().square().matrix().transpose() * op.diagonal;
        return spectrum.complex_vectors.cwiseAbs2().transpose() * op.diagonal;
    }
    const Eigen::MatrixXcd v = spectrum.vectors();
    const Eigen::MatrixXcd ov = op.dense * v;
    return (v.conjugate().array() * ov.array()).colwise().sum().real().transpose();
}

Eigen::MatrixXcd mixture_in_eigenbasis(const Spectrum& spectrum, const InitialMixture& mixture) {
    check_mixture(spectrum, mixture);
    const Eigen::Index m = static_cast<Eigen::Index>(mixture.components.size());
    const Eigen::Index n = spectrum.dim();
    Eigen::VectorXd w(m);
    for (Eigen::Index k = 0; k < m; ++k) w(k) = mixture.components[k].weight;
    if (spectrum.is_real()) {
        Eigen::MatrixXd rows(m, n);
        for (Eigen::Index k = 0; k < m; ++k) rows.row(k) = spectrum.real_vectors.row(mixture.components[k].index);
        const Eigen::MatrixXd wr = w.asDiagonal() * rows;
        return (rows.transpose() * wr).cast<cplx>();
    }
    Eigen::MatrixXcd rows(m, n);
    for (Eigen::Index k = 0; k < m; ++k) rows.row(k) = spectrum.complex_vectors.row(mixture.components[k].index);
    const Eigen::MatrixXcd wr = w.cast<cplx>().asDiagonal() * rows;
    return rows.adjoint() * wr;
}

std::vector<double> default_time_grid(double Omega, int transient_points, int window_points, double t_max_over_tauS) {
    if (!(Omega > 0.0)) throw ConfigError("time grid needs Omega > 0");
    if (transient_points < 0 || window_points < 2 || !(t_max_over_tauS > 1.0)) {
        throw ConfigError("time grid: need transient_points >= 0, window_points >= 2, t_max > tau_S");
    }
    const double tau = 2.0 * std::numbers::pi / Omega;
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(transient_points + window_points));
    for (int k = 0; k < transient_points; ++k) t.push_back(tau * k / transient_points);
    const double span = (t_max_over_tauS - 1.0) * tau;
    for (int k = 0; k < window_points; ++k) t.push_back(tau + span * k / (window_points - 1));
    return t;
}

ExpectationEvaluator::ExpectationEvaluator(const Spectrum& spectrum, const InitialMixture& mixture, const Observable& op)
    : energies_(spectrum.energies), trace_(mixture_trace(mixture)) {
    check_dims(spectrum, op);
    const Eigen::MatrixXcd rho = mixture_in_eigenbasis(spectrum, mixture);
    const Eigen::MatrixXcd o = to_eigenbasis(spectrum, op);
    weights_ = rho.cwiseProduct(o.transpose());
}

std::vector<double> ExpectationEvaluator::evaluate(const std::vector<double>& times) const {
    constexpr Eigen::Index batch = 128;
    const Eigen::Index n = energies_.size();
    const auto total = static_cast<Eigen::Index>(times.size());
    std::vector<double> out(times.size());
    const double scale = std::max(1.0, weights_.cwiseAbs().sum());
    for (Eigen::Index start = 0; start < total; start += batch) {
        const Eigen::Index b = std::min(batch, total - start);
        Eigen::MatrixXcd p(n, b);
        for (Eigen::Index j = 0; j < b; ++j) {
            const double t = times[static_cast<std::size_t>(start + j)];
            for (Eigen::Index k = 0; k < n; ++k) p(k, j) = std::polar(1.0, -energies_(k) * t);
        }
        const Eigen::MatrixXcd y = weights_ * p.conjugate();
        const Eigen::RowVectorXcd v = p.cwiseProduct(y).colwise().sum();
        for (Eigen::Index j = 0; j < b; ++j) {
            if (std::abs(v(j).imag()) > 1e-10 * scale) {
                throw NumericalError("evolve_expectation: imaginary residue " + std::to_string(v(j).imag()));
            }
            out[static_cast<std::size_t>(start + j)] = v(j).real();
        }
    }
    return out;
}

TimeTrace evolve_expectation(const Spectrum& spectrum, const InitialMixture& mixture, const Observable& op,
                             const std::vector<double>& times, bool normalize) {
    if (times.empty()) throw ConfigError("evolve_expectation: empty time grid");
    const ExpectationEvaluator eval(spectrum, mixture, op);
    TimeTrace tr;
    tr.times = times;
    tr.raw_values = eval.evaluate(times);
    tr.truncated_trace = eval.truncated_trace();
    tr.normalized = normalize;
    tr.values = tr.raw_values;
    if (normalize) {
        for (double& v : tr.values) v /= tr.truncated_trace;
    }
    tr.params = spectrum.params;
    tr.tau_S = spectrum.params.Omega > 0.0 ? 2.0 * std::numbers::pi / spectrum.params.Omega : 0.0;
    return tr;
}

DiagonalEnsembleResult diagonal_ensemble_average(const Spectrum& spectrum, const InitialMixture& mixture,
                                                 const Observable& op, double gap_tol) {
    check_mixture(spectrum, mixture);
    const Eigen::VectorXd odiag = eigenbasis_diagonal(spectrum, op);
    const Eigen::Index n = spectrum.dim();
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(n);
    for (const auto& c : mixture.components) pop += c.weight * spectrum.populations(c.index);

    DiagonalEnsembleResult r;
    r.trace = pop.sum();
    r.raw = pop.dot(odiag);
    const Eigen::VectorXd& e = spectrum.energies;
    for (Eigen::Index b1 = 0; b1 < n; ++b1) {
        for (Eigen::Index b2 = b1 + 1; b2 < n && e(b2) - e(b1) <= gap_tol; ++b2) {
            ++r.degenerate_pairs;
            const cplx term = mixture_element(spectrum, mixture, b1, b2) * observable_element(spectrum, op, b2, b1);
            r.raw += 2.0 * term.real();
        }
    }
    r.value = r.raw / r.trace;
    return r;
}

FluctuationResult infinite_time_fluctuations(const Spectrum& spectrum, const InitialMixture& mixture,
                                             const Observable& op, double gap_tol) {
    if (!(gap_tol >= 0.0)) throw ConfigError("gap tolerance must be >= 0");
    const Eigen::MatrixXcd rho = mixture_in_eigenbasis(spectrum, mixture);
    const Eigen::MatrixXcd o = to_eigenbasis(spectrum, op);
    const Eigen::VectorXd& e = spectrum.energies;
    const Eigen::Index n = spectrum.dim();

    FluctuationResult r;
    struct Term {
        double gap;
        cplx amp;
    };
    std::vector<Term> terms;
    for (Eigen::Index b2 = 0; b2 < n; ++b2) {
        for (Eigen::Index b1 = 0; b1 < b2; ++b1) {
            const double gap = e(b2) - e(b1);
            if (gap <= gap_tol) {
                ++r.zero_gap_pairs;
                continue;
            }
            ++r.pair_count;
            const cplx amp = rho(b1, b2) * o(b2, b1);
            if (amp != cplx(0.0, 0.0)) terms.push_back({gap, amp});
        }
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.gap < b.gap; });

    double sum = 0.0;
    std::size_t i = 0;
    while (i < terms.size()) {
        cplx group = terms[i].amp;
        std::size_t j = i + 1;
        while (j < terms.size() && terms[j].gap - terms[j - 1].gap <= gap_tol) group += terms[j++].amp;
        if (j - i > 1) ++r.degenerate_gap_groups;
        sum += std::norm(group);
        i = j;
    }
    // Each positive gap has a conjugate partner at -gap.
    r.raw = std::sqrt(2.0 * sum);
    r.value = r.raw / mixture_trace(mixture);
    return r;
}

TimeTrace apply_decoherence(const TimeTrace& trace, double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("decoherence rate must be >= 0");
    TimeTrace out = trace;
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        const double f = std::exp(-gamma * out.times[k]);
        out.values[k] *= f;
        if (k < out.raw_values.size()) out.raw_values[k] *= f;
    }
    return out;
}

RevivalEstimate predict_revival_time(std::vector<double> mode_freqs) {
    if (mode_freqs.size() < 2) throw ConfigError("predict_revival_time: revival undefined for a single mode");
    std::sort(mode_freqs.begin(), mode_freqs.end());
    RevivalEstimate r;
    r.min_spacing = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < mode_freqs.size(); ++j) {
        const double d = mode_freqs[j] - mode_freqs[j - 1];
        r.min_spacing = std::min(r.min_spacing, d);
        r.max_spacing = std::max(r.max_spacing, d);
    }
    r.mean_spacing = (mode_freqs.back() - mode_freqs.front()) / static_cast<double>(mode_freqs.size() - 1);
    if (!(r.mean_spacing > 0.0)) throw ConfigError("predict_revival_time: degenerate mode frequencies");
    r.tau_rev = 2.0 * std::numbers::pi / r.mean_spacing;
    return r;
}

} // namespace ionthermo
