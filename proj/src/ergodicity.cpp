// ergodicity.cpp — IPR / D_eff, windowed approximation, scaling fits

#include "ionthermo/ergodicity.hpp"

#include "ionthermo/errors.hpp"
#include "ionthermo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ionthermo {

namespace {

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_{0.0};
    double comp_{0.0};
};

double ipr_from_populations(const Eigen::VectorXd& p) { return 1.0 / p.array().square().sum(); }

double window_deff(const HamiltonianMatrix& h, const std::vector<Eigen::Index>& order,
                   const std::vector<Eigen::Index>& rank, const InitialMixture& mixture, Eigen::Index window,
                   int workers, std::vector<double>& iprs) {
    const Eigen::Index dim = h.matrix.rows();
    const std::size_t count = mixture.components.size();
    iprs.assign(count, 0.0);
    parallel_for(count, workers, [&](std::size_t k) {
        const Eigen::Index alpha = mixture.components[k].index;
        const Eigen::Index r = rank[static_cast<std::size_t>(alpha)];
        const Eigen::Index lo = std::clamp<Eigen::Index>(r - window / 2, 0, dim - window);
        HamiltonianMatrix sub;
        sub.params = h.params;
        sub.matrix.resize(window, window);
        sub.gauge.resize(window);
        for (Eigen::Index c = 0; c < window; ++c) {
            const Eigen::Index gc = order[static_cast<std::size_t>(lo + c)];
            sub.gauge(c) = h.gauge.size() == dim ? h.gauge(gc) : cplx(1.0, 0.0);
            for (Eigen::Index rr = 0; rr < window; ++rr) sub.matrix(rr, c) = h.matrix(order[static_cast<std::size_t>(lo + rr)], gc);
        }
        const Spectrum s = diagonalize(sub);
        iprs[k] = ipr_from_populations(s.populations(r - lo));
    });
    return weighted_mean(mixture, iprs);
}

} // namespace

double ipr(const Spectrum& spectrum, Eigen::Index alpha) {
    if (alpha < 0 || alpha >= spectrum.dim()) throw ConfigError("ipr: component index out of range");
    return ipr_from_populations(spectrum.populations(alpha));
}

std::vector<double> component_iprs(const Spectrum& spectrum, const InitialMixture& mixture) {
    std::vector<double> out;
    out.reserve(mixture.components.size());
    for (const auto& c : mixture.components) out.push_back(ipr(spectrum, c.index));
    return out;
}

double weighted_mean(const InitialMixture& mixture, const std::vector<double>& values) {
    if (mixture.components.empty()) throw ConfigError("empty mixture");
    if (values.size() != mixture.components.size()) throw ConfigError("weighted_mean: size mismatch");
    CompensatedSum num, den;
    for (std::size_t k = 0; k < values.size(); ++k) {
        num.add(mixture.components[k].weight * values[k]);
        den.add(mixture.components[k].weight);
    }
    if (!(den.value() > 0.0)) throw ConfigError("mixture weights sum to zero");
    return num.value() / den.value();
}

double effective_dimension(const Spectrum& spectrum, const InitialMixture& mixture) {
    return weighted_mean(mixture, component_iprs(spectrum, mixture));
}

ErgodicityReport windowed_deff(const HamiltonianMatrix& h, const std::vector<Eigen::Index>& energy_order,
                               const InitialMixture& mixture, const WindowOptions& options) {
    const Eigen::Index dim = h.matrix.rows();
    if (static_cast<Eigen::Index>(energy_order.size()) != dim) throw ConfigError("windowed_deff: ordering size mismatch");
    if (options.initial_window < 2) throw ConfigError("windowed_deff: window must be >= 2");
    if (options.step < 1) throw ConfigError("windowed_deff: step must be >= 1");
    if (!(options.tolerance > 0.0)) throw ConfigError("windowed_deff: tolerance must be > 0");
    if (mixture.components.empty()) throw ConfigError("windowed_deff: empty mixture");

    std::vector<Eigen::Index> rank(static_cast<std::size_t>(dim), -1);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const Eigen::Index a = energy_order[static_cast<std::size_t>(r)];
        if (a < 0 || a >= dim || rank[static_cast<std::size_t>(a)] != -1) throw ConfigError("windowed_deff: ordering is not a permutation");
        rank[static_cast<std::size_t>(a)] = r;
    }

    ErgodicityReport rep;
    Eigen::Index window = std::min(options.initial_window, dim);
    for (;;) {
        double d = 0.0;
        if (window >= dim) {
            window = dim;
            const Spectrum s = diagonalize(h);
            rep.component_ipr = component_iprs(s, mixture);
            d = weighted_mean(mixture, rep.component_ipr);
            rep.full_window = true;
        } else {
            d = window_deff(h, energy_order, rank, mixture, window, options.workers, rep.component_ipr);
        }
        if (!rep.history.empty()) rep.relative_change = std::abs(d - rep.history.back().second) / std::abs(d);
        rep.history.emplace_back(window, d);
        rep.D_eff = d;
        rep.window = window;
        if (rep.full_window) break;
        if (rep.history.size() > 1 && rep.relative_change < options.tolerance) break;
        window += options.step;
    }
    return rep;
}

TruncationEstimate truncation_uncertainty(const std::vector<std::pair<int, double>>& series) {
    if (series.size() < 2) throw ConfigError("truncation_uncertainty: need at least two cutoffs, sigma undefined");
    for (std::size_t k = 1; k < series.size(); ++k) {
        if (series[k].first <= series[k - 1].first) throw ConfigError("truncation_uncertainty: cutoffs must ascend");
    }
    const auto& last = series.back();
    const auto& prev = series[series.size() - 2];
    TruncationEstimate t;
    t.D1 = last.second;
    t.D2 = last.second + (last.second - prev.second) / static_cast<double>(last.first - prev.first);
    t.mean = 0.5 * (t.D1 + t.D2);
    t.sigma = std::abs(t.D1 - t.D2) / 4.0;
    return t;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("fit_line: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ConfigError("fit_line: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 1e-300)) throw ConfigError("fit_line: abscissae coincide, slope undefined");
    LinearFit f;
    f.points = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            ssr += r * r;
        }
        const double s2 = ssr / static_cast<double>(n - 2);
        f.slope_stderr = std::sqrt(s2 / sxx);
        f.intercept_stderr = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    }
    return f;
}

ScalingStudy fluctuation_scaling_study(const std::vector<ScalingInstance>& grid, int workers, double budget_bytes) {
    if (grid.empty()) throw ConfigError("fluctuation_scaling_study: empty grid");
    ScalingStudy study;
    study.rows.resize(grid.size());
    parallel_for(grid.size(), workers, [&](std::size_t i) {
        const ScalingInstance& inst = grid[i];
        ScalingRow& row = study.rows[i];
        row.id = inst.id;
        try {
            const HilbertSpace space = build_space(static_cast<int>(inst.params.mode_freqs.size()), inst.cutoff, budget_bytes);
            const HamiltonianMatrix h = build_hamiltonian(space, inst.params);
            const Spectrum s = diagonalize(h);
            const InitialMixture m = InitialMixture::pure(space.encode(inst.initial), inst.initial.spin);
            row.ipr = ipr(s, m.components.front().index);
            row.D_eff = row.ipr;
            row.delta_infty = infinite_time_fluctuations(s, m, Observable::from_diagonal(sigma_z_diagonal(space))).value;
            if (!(row.delta_infty > 0.0)) row.error = "zero fluctuations, excluded from fit";
        } catch (const ResourceError& e) {
            row.error = std::string("resource: ") + e.what();
        } catch (const NumericalError& e) {
            row.error = std::string("numerical: ") + e.what();
        } catch (const std::invalid_argument& e) {
            row.error = std::string("config: ") + e.what();
        }
    });
    std::vector<double> lx, ly;
    for (const auto& r : study.rows) {
        if (!r.error.empty()) continue;
        lx.push_back(std::log(r.ipr));
        ly.push_back(std::log(r.delta_infty));
    }
    if (lx.size() < 2) throw ConfigError("fluctuation_scaling_study: fewer than two usable instances, no fit");
    study.fit = fit_line(lx, ly);
    return study;
}

} // namespace ionthermo
