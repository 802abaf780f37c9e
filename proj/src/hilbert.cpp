// hilbert.cpp — basis bookkeeping and operator assembly

#include "ionthermo/hilbert.hpp"

#include "ionthermo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace ionthermo {

namespace {

Eigen::Index ipow(Eigen::Index base, int exp) {
    Eigen::Index r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

cplx i_power(int k) {
    switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

} // namespace

HilbertSpace::HilbertSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    if (modes < 1) throw ConfigError("HilbertSpace: need at least one mode");
    if (cutoff < 1) throw ConfigError("HilbertSpace: phonon cutoff must be >= 1");
    // Guard the integer power against overflow before computing it.
    const double approx = 2.0 * std::pow(cutoff + 1.0, modes);
    if (approx > 4.0e18) throw ResourceError("HilbertSpace: dimension overflows", UINT64_MAX);
    fock_dim_ = ipow(cutoff + 1, modes);
    dim_ = 2 * fock_dim_;
}

Eigen::Index HilbertSpace::encode(const BasisState& s) const {
    if (static_cast<int>(s.occupations.size()) != modes_) throw ConfigError("encode: occupation count mismatch");
    Eigen::Index idx = 0;
    for (int n : s.occupations) {
        if (n < 0 || n > cutoff_) throw ConfigError("encode: occupation outside cutoff");
        idx = idx * (cutoff_ + 1) + n;
    }
    return (s.spin == Spin::up ? fock_dim_ : 0) + idx;
}

BasisState HilbertSpace::decode(Eigen::Index index) const {
    if (index < 0 || index >= dim_) throw ConfigError("decode: index out of range");
    BasisState s;
    s.spin = spin_of(index);
    Eigen::Index rest = index % fock_dim_;
    s.occupations.assign(modes_, 0);
    for (int j = modes_ - 1; j >= 0; --j) {
        s.occupations[j] = static_cast<int>(rest % (cutoff_ + 1));
        rest /= (cutoff_ + 1);
    }
    return s;
}

int HilbertSpace::total_phonons(Eigen::Index index) const {
    Eigen::Index rest = index % fock_dim_;
    int total = 0;
    for (int j = 0; j < modes_; ++j) {
        total += static_cast<int>(rest % (cutoff_ + 1));
        rest /= (cutoff_ + 1);
    }
    return total;
}

double dense_matrix_bytes(Eigen::Index dim) {
    return static_cast<double>(dim) * static_cast<double>(dim) * sizeof(cplx);
}

HilbertSpace build_space(int modes, int cutoff, double budget_bytes) {
    HilbertSpace space(modes, cutoff);
    const double need = dense_matrix_bytes(space.dim());
    if (need > budget_bytes) {
        std::ostringstream msg;
        msg << "dimension " << space.dim() << " needs " << static_cast<std::uint64_t>(need)
            << " bytes for one dense complex matrix, budget is " << static_cast<std::uint64_t>(budget_bytes);
        throw ResourceError(msg.str(), static_cast<std::uint64_t>(need));
    }
    return space;
}

Eigen::MatrixXcd mode_displacement(int cutoff, double eta) {
    const int n = cutoff + 1;
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        x(k, k + 1) = x(k + 1, k) = std::sqrt(static_cast<double>(k + 1));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    if (es.info() != Eigen::Success) throw NumericalError("mode_displacement: quadrature eigensolver failed");
    const Eigen::MatrixXd& u = es.eigenvectors();
    Eigen::VectorXcd phase(n);
    for (int k = 0; k < n; ++k) phase(k) = std::polar(1.0, eta * es.eigenvalues()(k));
    return u.cast<cplx>() * phase.asDiagonal() * u.transpose().cast<cplx>();
}

HamiltonianMatrix build_hamiltonian(const HilbertSpace& space, const HamiltonianParams& params) {
    const int N = space.modes();
    if (static_cast<int>(params.mode_freqs.size()) != N || static_cast<int>(params.etas.size()) != N) {
        throw ConfigError("build_hamiltonian: expected " + std::to_string(N) + " mode frequencies and etas");
    }
    const Eigen::Index fd = space.fock_dim();
    const Eigen::Index dim = space.dim();

    // D = D_1 (x) D_2 (x) ... with mode 1 most significant
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Ones(1, 1);
    for (int j = 0; j < N; ++j) {
        const Eigen::MatrixXcd dj = mode_displacement(space.cutoff(), params.etas[j]);
        Eigen::MatrixXcd next(d.rows() * dj.rows(), d.cols() * dj.cols());
        for (Eigen::Index r = 0; r < d.rows(); ++r) {
            for (Eigen::Index c = 0; c < d.cols(); ++c) {
                next.block(r * dj.rows(), c * dj.cols(), dj.rows(), dj.cols()) = d(r, c) * dj;
            }
        }
        d = std::move(next);
    }

    HamiltonianMatrix h;
    h.params = params;
    h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::VectorXd e0 = uncoupled_energies(space, params.omega_z, params.mode_freqs);
    h.matrix.diagonal() = e0.cast<cplx>();
    // s+ = |up><down| places D in the (up, down) block.
    const double half = 0.5 * params.Omega;
    h.matrix.block(fd, 0, fd, fd) = half * d;
    h.matrix.block(0, fd, fd, fd) = half * d.adjoint();

    h.gauge.resize(dim);
    for (Eigen::Index a = 0; a < dim; ++a) h.gauge(a) = i_power(space.total_phonons(a));
    return h;
}

Eigen::VectorXd uncoupled_energies(const HilbertSpace& space, double omega_z, const std::vector<double>& mode_freqs) {
    if (static_cast<int>(mode_freqs.size()) != space.modes()) {
        throw ConfigError("uncoupled_energies: mode frequency count mismatch");
    }
    const Eigen::Index dim = space.dim();
    Eigen::VectorXd e(dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const BasisState s = space.decode(a);
        double v = (s.spin == Spin::up ? 0.5 : -0.5) * omega_z;
        for (int j = 0; j < space.modes(); ++j) v += s.occupations[j] * mode_freqs[j];
        e(a) = v;
    }
    return e;
}

std::vector<Eigen::Index> energy_sorted_basis(const HilbertSpace& space, double omega_z,
                                              const std::vector<double>& mode_freqs) {
    const Eigen::VectorXd e = uncoupled_energies(space, omega_z, mode_freqs);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(space.dim()));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) { return e(a) < e(b); });
    return perm;
}

InitialMixture InitialMixture::pure(Eigen::Index index, Spin spin) {
    InitialMixture m;
    m.components.push_back({1.0, index});
    m.spin = spin;
    m.truncated_trace = 1.0;
    return m;
}

InitialMixture thermal_initial_state(const HilbertSpace& space, const std::vector<double>& nbar, Spin spin,
                                     double weight_floor) {
    const int N = space.modes();
    if (static_cast<int>(nbar.size()) != N) throw ConfigError("thermal_initial_state: nbar list length must equal N");
    for (double v : nbar) {
        if (!(v >= 0.0)) throw ConfigError("thermal_initial_state: nbar must be >= 0");
    }
    if (!(weight_floor >= 0.0 && weight_floor < 1.0)) throw ConfigError("weight_floor must be in [0, 1)");

    // Per-mode geometric law p_j(n) = nbar^n / (1+nbar)^(n+1)
    const int levels = space.cutoff() + 1;
    std::vector<std::vector<double>> p(N, std::vector<double>(levels));
    for (int j = 0; j < N; ++j) {
        const double q = nbar[j] / (1.0 + nbar[j]);
        double v = 1.0 / (1.0 + nbar[j]);
        for (int n = 0; n < levels; ++n) {
            p[j][n] = v;
            v *= q;
        }
    }

    InitialMixture m;
    m.spin = spin;
    m.nbar = nbar;
    const Eigen::Index offset = spin == Spin::up ? space.fock_dim() : 0;
    double wmax = 0.0;
    std::vector<MixtureComponent> all;
    for (Eigen::Index f = 0; f < space.fock_dim(); ++f) {
        const BasisState s = space.decode(offset + f);
        double w = 1.0;
        for (int j = 0; j < N; ++j) w *= p[j][s.occupations[j]];
        if (w > 0.0) {
            all.push_back({w, offset + f});
            wmax = std::max(wmax, w);
        }
    }
    for (const auto& c : all) {
        if (c.weight >= weight_floor * wmax) m.components.push_back(c);
    }
    // Sum small-to-large for a tight total.
    std::vector<double> ws;
    ws.reserve(m.components.size());
    for (const auto& c : m.components) ws.push_back(c.weight);
    std::sort(ws.begin(), ws.end());
    m.truncated_trace = std::accumulate(ws.begin(), ws.end(), 0.0);
    return m;
}

Eigen::VectorXd sigma_z_diagonal(const HilbertSpace& space) {
    Eigen::VectorXd s(space.dim());
    s.head(space.fock_dim()).setConstant(-1.0);
    s.tail(space.fock_dim()).setConstant(1.0);
    return s;
}

Eigen::MatrixXcd sigma_operator(const HilbertSpace& space, char axis) {
    const Eigen::Index fd = space.fock_dim();
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    switch (axis) {
    case 'x':
        op.block(fd, 0, fd, fd).diagonal().setConstant(1.0);
        op.block(0, fd, fd, fd).diagonal().setConstant(1.0);
        break;
    case 'y':
        // sigma_y = -i|up><down| + i|down><up|
        op.block(fd, 0, fd, fd).diagonal().setConstant(cplx(0.0, -1.0));
        op.block(0, fd, fd, fd).diagonal().setConstant(cplx(0.0, 1.0));
        break;
    case 'z':
        op.diagonal() = sigma_z_diagonal(space).cast<cplx>();
        break;
    default:
        throw ConfigError(std::string("sigma_operator: unknown axis ") + axis);
    }
    return op;
}

} // namespace ionthermo
