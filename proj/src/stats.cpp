// stats.cpp — finite-window statistics and resampling

#include "ionthermo/stats.hpp"

#include "ionthermo/errors.hpp"
#include "ionthermo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ionthermo {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

double mean_of(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s / static_cast<double>(n);
}

// Two-pass sample std, S-1 denominator.
double std_of(const double* x, std::size_t n, double mean) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (x[i] - mean) * (x[i] - mean);
    return std::sqrt(s / static_cast<double>(n - 1));
}

void check_trace(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw ConfigError("time and value arrays differ in length");
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {
    counter_[2] = static_cast<std::uint32_t>(stream);
    counter_[3] = static_cast<std::uint32_t>(stream >> 32);
}

Philox4x32::block Philox4x32::generate(block c, std::array<std::uint32_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::uint32_t Philox4x32::next_u32() noexcept {
    if (used_ == 4) {
        buffer_ = generate(counter_, key_);
        if (++counter_[0] == 0) ++counter_[1];
        used_ = 0;
    }
    return buffer_[static_cast<std::size_t>(used_++)];
}

std::uint64_t Philox4x32::next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double Philox4x32::next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Philox4x32::next_below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ index);
}

TimeWindow default_window(double tau_S) {
    if (!(tau_S > 0.0)) throw ConfigError("default_window: tau_S must be > 0");
    return {tau_S, 13.0 * tau_S};
}

std::vector<double> window_samples(const std::vector<double>& times, const std::vector<double>& values,
                                   const TimeWindow& window) {
    check_trace(times, values);
    if (!(window.hi >= window.lo)) throw ConfigError("window upper bound below lower bound");
    const double lo = window.lo - 1e-9 * std::abs(window.lo);
    const double hi = window.hi + 1e-9 * std::abs(window.hi);
    std::vector<double> out;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= lo && times[k] <= hi) out.push_back(values[k]);
    }
    return out;
}

double sample_mean(const std::vector<double>& x) {
    if (x.empty()) throw ConfigError("empty window: no samples");
    return mean_of(x.data(), x.size());
}

double sample_std(const std::vector<double>& x) {
    if (x.size() < 2) throw ConfigError("fluctuation needs at least two samples in the window");
    return std_of(x.data(), x.size(), mean_of(x.data(), x.size()));
}

double window_time_average(const std::vector<double>& times, const std::vector<double>& values, const TimeWindow& window) {
    return sample_mean(window_samples(times, values, window));
}

double window_fluctuation(const std::vector<double>& times, const std::vector<double>& values, const TimeWindow& window) {
    return sample_std(window_samples(times, values, window));
}

double window_time_average(const TimeTrace& trace, const TimeWindow& window) {
    return window_time_average(trace.times, trace.values, window);
}

double window_fluctuation(const TimeTrace& trace, const TimeWindow& window) {
    return window_fluctuation(trace.times, trace.values, window);
}

std::vector<double> simulate_projective_sampling(const std::vector<double>& values, int repetitions, std::uint64_t seed) {
    if (repetitions < 1) throw ConfigError("simulate_projective_sampling: repetitions must be >= 1");
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        if (!(std::abs(v) <= 1.0 + 1e-9)) throw ConfigError("simulate_projective_sampling: value " + std::to_string(v) + " outside [-1, 1]");
        const double p = std::clamp((1.0 + v) / 2.0, 0.0, 1.0);
        Philox4x32 rng(seed, k);
        long ups = 0;
        for (int i = 0; i < repetitions; ++i) ups += rng.next_double() < p ? 1 : 0;
        out[k] = 2.0 * static_cast<double>(ups) / repetitions - 1.0;
    }
    return out;
}

WindowStats bootstrap_uncertainty(const std::vector<double>& times, const std::vector<double>& values,
                                  const TimeWindow& window, std::size_t resamples, std::uint64_t seed, int workers) {
    if (resamples < 1) throw ConfigError("bootstrap_uncertainty: resamples must be >= 1");
    const std::vector<double> x = window_samples(times, values, window);
    WindowStats st;
    st.window = window;
    st.samples = x.size();
    st.seed = seed;
    st.resamples = resamples;
    st.mu_exp = sample_mean(x);
    st.delta_exp = sample_std(x);

    const std::size_t s = x.size();
    std::vector<double> mu(resamples), delta(resamples);
    constexpr std::size_t chunk = 256;
    const std::size_t chunks = (resamples + chunk - 1) / chunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        std::vector<double> buf(s);
        const std::size_t end = std::min(resamples, (c + 1) * chunk);
        for (std::size_t b = c * chunk; b < end; ++b) {
            Philox4x32 rng(seed, b);
            for (std::size_t i = 0; i < s; ++i) buf[i] = x[rng.next_below(s)];
            mu[b] = mean_of(buf.data(), s);
            delta[b] = std_of(buf.data(), s, mu[b]);
        }
    });
    st.bootstrap_mu_mean = mean_of(mu.data(), resamples);
    st.bootstrap_delta_mean = mean_of(delta.data(), resamples);
    if (resamples < 2) {
        st.errors_undefined = true;
    } else {
        st.mu_exp_err = std_of(mu.data(), resamples, st.bootstrap_mu_mean);
        st.delta_exp_err = std_of(delta.data(), resamples, st.bootstrap_delta_mean);
    }
    return st;
}

WindowStats bootstrap_uncertainty(const TimeTrace& trace, const TimeWindow& window, std::size_t resamples,
                                  std::uint64_t seed, int workers) {
    return bootstrap_uncertainty(trace.times, trace.values, window, resamples, seed, workers);
}

std::vector<ThermalizationPoint> postselect_thermalized(const std::vector<ThermalizationPoint>& points, double threshold) {
    std::vector<ThermalizationPoint> out;
    for (const auto& p : points) {
        if (std::abs(p.mu_exp - p.mu_micro) < threshold) out.push_back(p);
    }
    return out;
}

} // namespace ionthermo
