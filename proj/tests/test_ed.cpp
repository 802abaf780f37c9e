// test_ed.cpp — diagonalization, eigenbasis dynamics, diagonal ensemble

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ionthermo/ed.hpp"
#include "ionthermo/errors.hpp"
#include "ionthermo/ionchain.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

using namespace ionthermo;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Instance {
    HilbertSpace space;
    HamiltonianMatrix h;
    InitialMixture mix;
};

Instance n2_instance(int nc = 6, double omega_z = kTwoPi * 0.4) {
    const IonChain c = make_ion_chain(2, kTwoPi * 0.707, 0.54);
    HilbertSpace sp(2, nc);
    HamiltonianMatrix h = build_hamiltonian(sp, {omega_z, kTwoPi * 0.95, c.mode_freqs, c.etas});
    InitialMixture m = thermal_initial_state(sp, {0.3, 1.0});
    return {sp, h, m};
}

Observable sz(const HilbertSpace& sp) { return Observable::from_diagonal(sigma_z_diagonal(sp)); }

} // namespace

TEST_CASE("2x2 carrier block") {
    Eigen::MatrixXcd h(2, 2);
    h << 0.0, 0.5, 0.5, 0.0;
    const Spectrum s = diagonalize(h);
    CHECK(s.energies(0) == doctest::Approx(-0.5));
    CHECK(s.energies(1) == doctest::Approx(0.5));
    const Eigen::MatrixXcd v = s.vectors();
    CHECK(std::abs(std::abs(v(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(v(0, 1) - v(1, 1)) < 1e-14); // symmetric combination at +Omega/2
    CHECK(std::abs(v(0, 0) + v(1, 0)) < 1e-14);
}

TEST_CASE("uncoupled spectrum is the sorted bare spectrum, exactly") {
    const HilbertSpace sp(2, 4);
    const HamiltonianMatrix h = build_hamiltonian(sp, {0.7, 0.0, {1.0, std::sqrt(3.0)}, {0.5, 0.3}});
    const Spectrum s = diagonalize(h);
    Eigen::VectorXd e0 = uncoupled_energies(sp, 0.7, {1.0, std::sqrt(3.0)});
    std::sort(e0.data(), e0.data() + e0.size());
    CHECK((s.energies - e0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.residual == 0.0);
}

TEST_CASE("spectrum invariants on a coupled two-mode instance") {
    const Instance in = n2_instance();
    const Spectrum s = diagonalize(in.h);
    CHECK(s.is_real());
    CHECK(s.residual <= 1e-8);
    const double norm = in.h.matrix.cwiseAbs().maxCoeff();
    CHECK(std::abs(s.energies.sum() - in.h.matrix.trace().real()) <= 1e-8 * norm * s.dim());
    const Eigen::MatrixXcd v = s.vectors();
    CHECK((v.adjoint() * v - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() <= 1e-8);
    // Reconstruction on random probes.
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXcd x(s.dim());
        for (auto& z : x) z = cplx(g(rng), g(rng));
        const Eigen::VectorXcd y = v * (s.energies.cast<cplx>().asDiagonal() * (v.adjoint() * x));
        CHECK((y - in.h.matrix * x).norm() <= 1e-8 * norm * x.norm() * 10);
    }
    for (Eigen::Index b = 1; b < s.dim(); ++b) CHECK(s.energies(b) >= s.energies(b - 1));
}

TEST_CASE("non-gaugeable input falls back to the complex solver") {
    Eigen::MatrixXcd h(3, 3);
    h << 1.0, cplx(0.0, 0.3), 0.2, cplx(0.0, -0.3), 0.5, cplx(0.1, 0.4), 0.2, cplx(0.1, -0.4), -0.7;
    const Spectrum s = diagonalize(h);
    CHECK_FALSE(s.is_real());
    CHECK(s.residual <= 1e-12);
    Eigen::MatrixXcd nh = h;
    nh(0, 1) += 1.0;
    CHECK_THROWS_AS(diagonalize(nh), std::invalid_argument);
}

TEST_CASE("time evolution agrees with a dense matrix-exponential propagator") {
    const Instance in = n2_instance(5);
    const Spectrum s = diagonalize(in.h);
    const Eigen::VectorXd z = sigma_z_diagonal(in.space);
    std::vector<double> times;
    for (int k = 0; k < 20; ++k) times.push_back(0.37 * k);
    const TimeTrace tr = evolve_expectation(s, in.mix, sz(in.space), times, false);
    const cplx mi(0.0, -1.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const Eigen::MatrixXcd u = (mi * times[k] * in.h.matrix).exp();
        double expect = 0.0;
        for (const auto& c : in.mix.components) {
            const Eigen::VectorXcd psi = u.col(c.index);
            expect += c.weight * (psi.cwiseAbs2().array() * z.array()).sum();
        }
        CHECK(std::abs(tr.raw_values[k] - expect) <= 1e-8);
    }
    CHECK(tr.raw_values[0] == doctest::Approx(-in.mix.truncated_trace).epsilon(1e-12));
    const TimeTrace norm = evolve_expectation(s, in.mix, sz(in.space), times);
    CHECK(norm.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
    for (double v : norm.values) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

TEST_CASE("resonant carrier Rabi flopping") {
    const HilbertSpace sp(1, 20);
    const double om = kTwoPi * 0.73;
    const HamiltonianMatrix h = build_hamiltonian(sp, {0.0, om, {kTwoPi * 0.724}, {1e-8}});
    const Spectrum s = diagonalize(h);
    const auto times = default_time_grid(om);
    CHECK(times.size() == 130);
    const TimeTrace tr = evolve_expectation(s, InitialMixture::pure(0), sz(sp), times);
    double err = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) err = std::max(err, std::abs(tr.values[k] + std::cos(om * times[k])));
    CHECK(err <= 1e-6);
    CHECK(tr.tau_S == doctest::Approx(kTwoPi / om));
    CHECK(infinite_time_fluctuations(s, InitialMixture::pure(0), sz(sp)).value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(diagonal_ensemble_average(s, InitialMixture::pure(0), sz(sp)).value) <= 1e-6);
}

TEST_CASE("default time grid layout") {
    const double om = 2.0;
    const auto t = default_time_grid(om);
    const double tau = kTwoPi / om;
    CHECK(t.front() == 0.0);
    CHECK(t[29] < tau);
    CHECK(t[30] == doctest::Approx(tau));
    CHECK(t.back() == doctest::Approx(13 * tau));
    CHECK_THROWS_AS(default_time_grid(0.0), std::invalid_argument);
}

TEST_CASE("uncoupled dynamics are frozen") {
    const HilbertSpace sp(2, 3);
    const HamiltonianMatrix h = build_hamiltonian(sp, {0.0, 0.0, {1.0, std::sqrt(3.0)}, {0.5, 0.4}});
    const Spectrum s = diagonalize(h);
    const InitialMixture m = thermal_initial_state(sp, {0.5, 0.5});
    CHECK(diagonal_ensemble_average(s, m, sz(sp)).value == -1.0);
    CHECK(infinite_time_fluctuations(s, m, sz(sp)).value == 0.0);
}

TEST_CASE("diagonal ensemble: trace, eigenstate input and long-time average") {
    const Instance in = n2_instance(6);
    const Spectrum s = diagonalize(in.h);
    const auto de = diagonal_ensemble_average(s, in.mix, sz(in.space));
    CHECK(std::abs(de.trace - in.mix.truncated_trace) <= 1e-12);
    CHECK(de.value >= -1.0);
    CHECK(de.value <= 1.0);

    // A pure basis state is not an eigenstate, but an eigenvector-weighted
    // check of O_bb uses the identity observable.
    const Observable id = Observable::from_diagonal(Eigen::VectorXd::Ones(s.dim()));
    CHECK(diagonal_ensemble_average(s, in.mix, id).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(infinite_time_fluctuations(s, in.mix, id).value <= 1e-12);

    // Long-time average oracle over [0, 1000 tau_S].
    const double tau = kTwoPi / in.h.params.Omega;
    std::vector<double> times(100000);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = 1000.0 * tau * k / (times.size() - 1);
    const TimeTrace tr = evolve_expectation(s, in.mix, sz(in.space), times);
    double mean = 0.0;
    for (double v : tr.values) mean += v;
    mean /= static_cast<double>(tr.values.size());
    CHECK(std::abs(mean - de.value) <= 5e-3);
}

TEST_CASE("degenerate gaps are summed coherently") {
    // Ladder E = 0,1,2,3 with a nearest-neighbour hopping observable, seen
    // from a rotated basis in which the uniform superposition is |0>.
    const int n = 4;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) h(k, k) = static_cast<double>(k);
    for (int k = 0; k + 1 < n; ++k) o(k, k + 1) = o(k + 1, k) = 1.0;
    Eigen::MatrixXcd u(n, n);
    u << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, -0.5, -0.5, 0.5, -0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5;
    const Spectrum s = diagonalize(Eigen::MatrixXcd(u.adjoint() * h * u));
    const Observable ob = Observable::from_matrix(u.adjoint() * o * u);
    // rho_12 = 1/4; three pairs share gap 1: delta^2 = 2 |3/4|^2.
    const auto f = infinite_time_fluctuations(s, InitialMixture::pure(0), ob);
    CHECK(f.value == doctest::Approx(std::sqrt(2.0) * 0.75).epsilon(1e-10));
    CHECK(f.degenerate_gap_groups == 1);
    CHECK(f.pair_count == 6);
}

TEST_CASE("decoherence envelope") {
    TimeTrace tr;
    const double tau = 2.0;
    for (int k = 0; k <= 13; ++k) {
        tr.times.push_back(k * tau);
        tr.values.push_back(-1.0);
        tr.raw_values.push_back(-1.0);
    }
    const TimeTrace same = apply_decoherence(tr, 0.0);
    CHECK(same.values == tr.values);
    const TimeTrace d = apply_decoherence(tr, 0.01 / tau);
    CHECK(d.values.back() == doctest::Approx(-std::exp(-0.13)).epsilon(1e-14));
    CHECK(-d.values.back() == doctest::Approx(0.8781).epsilon(1e-4));
    for (std::size_t k = 0; k < d.times.size(); ++k) CHECK(d.values[k] == doctest::Approx(-std::exp(-0.01 * d.times[k] / tau)));
    CHECK_THROWS_AS(apply_decoherence(tr, -1.0), std::invalid_argument);
}

TEST_CASE("revival time estimate") {
    CHECK(predict_revival_time({1.0, 2.0}).tau_rev == doctest::Approx(kTwoPi));
    const auto c = make_ion_chain(3, 1.0, 0.5);
    const auto r = predict_revival_time(c.mode_freqs);
    CHECK(r.mean_spacing == doctest::Approx((c.mode_freqs[2] - c.mode_freqs[0]) / 2));
    CHECK(r.mean_spacing == doctest::Approx(0.704).epsilon(1e-3));
    CHECK(r.min_spacing <= r.mean_spacing);
    CHECK(r.max_spacing >= r.mean_spacing);
    CHECK_THROWS_AS(predict_revival_time({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(predict_revival_time({1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("time reversal returns the initial value") {
    const Instance in = n2_instance(4);
    const Spectrum s = diagonalize(in.h);
    const Eigen::MatrixXcd rho = mixture_in_eigenbasis(s, in.mix);
    const Eigen::MatrixXcd o = to_eigenbasis(s, sz(in.space));
    CHECK(std::abs(rho.trace().real() - in.mix.truncated_trace) <= 1e-12);
    const double t = 3.7;
    Eigen::MatrixXcd fwd = rho, back = rho;
    for (Eigen::Index a = 0; a < s.dim(); ++a)
        for (Eigen::Index b = 0; b < s.dim(); ++b) {
            fwd(a, b) *= std::polar(1.0, -(s.energies(a) - s.energies(b)) * t);
            back(a, b) = fwd(a, b) * std::polar(1.0, (s.energies(a) - s.energies(b)) * t);
        }
    const ExpectationEvaluator ev(s, in.mix, sz(in.space));
    CHECK(std::abs((fwd * o).trace().real() - ev.evaluate({t})[0]) <= 1e-10);
    CHECK(std::abs((back * o).trace().real() - ev.evaluate({0.0})[0]) <= 1e-10);
    CHECK(std::abs(fwd.trace().real() - in.mix.truncated_trace) <= 1e-12);
}
