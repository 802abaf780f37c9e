// ionchain.cpp — linear Coulomb crystal: equilibrium, normal modes, couplings

#include "ionthermo/ionchain.hpp"

#include "ionthermo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ionthermo {

namespace {

void check_ion_count(int N) {
    if (N < 1 || N > kMaxIons) {
        throw ConfigError("ion count must be in 1.." + std::to_string(kMaxIons) + ", got " + std::to_string(N));
    }
}

Eigen::VectorXd force_balance(const Eigen::VectorXd& u) {
    const auto n = u.size();
    Eigen::VectorXd f = u;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == i) continue;
            const double d = u(i) - u(k);
            f(i) += (k < i ? -1.0 : 1.0) / (d * d);
        }
    }
    return f;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (!(u(i) > u(i - 1))) return false;
    }
    return true;
}

} // namespace

std::vector<double> IonChain::frequency_ratios() const {
    std::vector<double> r(mode_freqs.size());
    std::transform(mode_freqs.begin(), mode_freqs.end(), r.begin(), [&](double w) { return w / mode_freqs.front(); });
    return r;
}

double force_residual(const std::vector<double>& u) {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    return u.empty() ? 0.0 : force_balance(v).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd axial_hessian(const std::vector<double>& u) {
    const auto n = static_cast<Eigen::Index>(u.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (k == i) continue;
            const double c = 2.0 / std::pow(std::abs(u[i] - u[k]), 3);
            a(i, i) += c;
            a(i, k) = -c;
        }
    }
    return a;
}

std::vector<double> equilibrium_positions(int N) {
    check_ion_count(N);
    constexpr int max_iter = 200;
    constexpr double tol = 1e-13;

    Eigen::VectorXd u(N);
    for (int i = 0; i < N; ++i) u(i) = 1.0 * (i - 0.5 * (N - 1));

    Eigen::VectorXd f = force_balance(u);
    double res = f.cwiseAbs().maxCoeff();
    for (int it = 0; it < max_iter && res > tol; ++it) {
        const std::vector<double> uv(u.data(), u.data() + N);
        const Eigen::VectorXd step = axial_hessian(uv).ldlt().solve(-f);
        double lambda = 1.0;
        while (true) {
            const Eigen::VectorXd trial = u + lambda * step;
            if (strictly_increasing(trial)) {
                const Eigen::VectorXd ft = force_balance(trial);
                const double rt = ft.cwiseAbs().maxCoeff();
                if (rt < res || lambda < 1e-8) {
                    u = trial;
                    f = ft;
                    res = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if (lambda < 1e-12) {
                throw NumericalError("equilibrium_positions: line search stalled, residual " + std::to_string(res), res);
            }
        }
    }
    if (res > 1e-12) {
        throw NumericalError("equilibrium_positions: no convergence for N=" + std::to_string(N) + ", residual " +
                                 std::to_string(res),
                             res);
    }
    // Exact mirror symmetry; the Newton iterate is symmetric only to rounding.
    Eigen::VectorXd sym(N);
    for (int i = 0; i < N; ++i) sym(i) = 0.5 * (u(i) - u(N - 1 - i));
    if (force_balance(sym).cwiseAbs().maxCoeff() <= res) u = sym;
    return {u.data(), u.data() + N};
}

NormalModes normal_modes(int N, double omega1) {
    if (!(omega1 > 0.0)) throw ConfigError("normal_modes: omega1 must be positive");
    const auto u = equilibrium_positions(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(axial_hessian(u));
    if (es.info() != Eigen::Success) throw NumericalError("normal_modes: Hessian eigensolver failed");

    NormalModes modes;
    modes.vectors = es.eigenvectors();
    modes.freqs.resize(N);
    for (int j = 0; j < N; ++j) {
        // The COM eigenvalue is exactly 1; rounding can leave it at 1 - 1e-16.
        const double lambda = std::max(es.eigenvalues()(j), 0.0);
        modes.freqs[j] = omega1 * std::sqrt(j == 0 ? 1.0 : lambda);
        auto col = modes.vectors.col(j);
        for (int i = 0; i < N; ++i) {
            if (std::abs(col(i)) > 1e-12) {
                if (col(i) < 0.0) col = -col;
                break;
            }
        }
    }
    return modes;
}

std::vector<double> lamb_dicke_parameters(const NormalModes& modes, double eta1, int spin_ion_index) {
    const int N = static_cast<int>(modes.freqs.size());
    if (spin_ion_index < 1 || spin_ion_index > N) {
        throw ConfigError("spin_ion_index must be in 1.." + std::to_string(N));
    }
    if (eta1 < 0.0) throw ConfigError("eta1 must be non-negative");
    const int s = spin_ion_index - 1;
    const double b1 = modes.vectors(s, 0);
    std::vector<double> etas(N);
    etas[0] = eta1;
    for (int j = 1; j < N; ++j) {
        const double mj = modes.vectors(s, j) / b1;
        etas[j] = mj * std::sqrt(modes.freqs[0] / modes.freqs[j]) * eta1;
    }
    return etas;
}

IonChain make_ion_chain(int N, double omega1, double eta1, int spin_ion_index) {
    IonChain chain;
    chain.N = N;
    chain.omega1 = omega1;
    chain.positions = equilibrium_positions(N);
    auto modes = normal_modes(N, omega1);
    chain.etas = lamb_dicke_parameters(modes, eta1, spin_ion_index);
    chain.mode_freqs = std::move(modes.freqs);
    chain.mode_vectors = std::move(modes.vectors);
    chain.spin_ion_index = spin_ion_index;
    chain.eta1 = eta1;
    return chain;
}

} // namespace ionthermo
