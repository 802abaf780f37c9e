// stats.hpp — window averages and fluctuations, simulated projective
// measurements, bootstrap uncertainties and thermalization postselection

#pragma once

#include "ionthermo/ed.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ionthermo {

// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the stream for
// (key, stream id) is a pure function of both, so parallel consumers draw
// identical numbers regardless of scheduling.
class Philox4x32 {
public:
    using block = std::array<std::uint32_t, 4>;
    static constexpr std::string_view algorithm_id = "philox4x32-10";

    Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept;

    static block generate(block counter, std::array<std::uint32_t, 2> key) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;
    double next_double() noexcept; // [0, 1), 53 bits
    // Uniform integer in [0, n) by multiply-shift.
    std::uint64_t next_below(std::uint64_t n) noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    block counter_{};
    block buffer_{};
    int used_{4};
};

// Derived seed for sub-task `index` (SplitMix64 finalizer over both inputs).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

struct TimeWindow {
    double lo{0.0}; // us
    double hi{0.0};
};

// [tau_S, 13 tau_S]
TimeWindow default_window(double tau_S);

// Samples with lo <= t <= hi, boundaries widened by 1e-9 relative.
std::vector<double> window_samples(const std::vector<double>& times, const std::vector<double>& values,
                                   const TimeWindow& window);

double sample_mean(const std::vector<double>& x);
// Sample standard deviation with the S-1 denominator. Requires S >= 2.
double sample_std(const std::vector<double>& x);

double window_time_average(const std::vector<double>& times, const std::vector<double>& values, const TimeWindow& window);
double window_fluctuation(const std::vector<double>& times, const std::vector<double>& values, const TimeWindow& window);
double window_time_average(const TimeTrace& trace, const TimeWindow& window);
double window_fluctuation(const TimeTrace& trace, const TimeWindow& window);

// Per point k: Binomial(r, (1+v_k)/2) drawn as r Bernoulli trials from the
// stream (seed, k); returns 2 k/r - 1.
std::vector<double> simulate_projective_sampling(const std::vector<double>& values, int repetitions, std::uint64_t seed);

struct WindowStats {
    double mu_exp{0.0};
    double delta_exp{0.0};
    std::size_t samples{0};
    TimeWindow window;
    double mu_exp_err{0.0};    // bootstrap std of mu_exp
    double delta_exp_err{0.0}; // bootstrap std of delta_exp
    double bootstrap_mu_mean{0.0};
    double bootstrap_delta_mean{0.0};
    std::uint64_t seed{0};
    std::size_t resamples{0};
    bool errors_undefined{false}; // a single resample has no spread; errors reported as 0
};

// Resample b uses stream (seed, b); results are reduced in resample order so
// every worker count gives bit-identical output.
WindowStats bootstrap_uncertainty(const std::vector<double>& times, const std::vector<double>& values,
                                  const TimeWindow& window, std::size_t resamples = 100000, std::uint64_t seed = 0,
                                  int workers = 1);
WindowStats bootstrap_uncertainty(const TimeTrace& trace, const TimeWindow& window, std::size_t resamples = 100000,
                                  std::uint64_t seed = 0, int workers = 1);

struct ThermalizationPoint {
    double mu_exp{0.0};
    double mu_micro{0.0};
    double D_eff{0.0};
};

// Keeps points with |mu_exp - mu_micro| < threshold (strict).
std::vector<ThermalizationPoint> postselect_thermalized(const std::vector<ThermalizationPoint>& points,
                                                        double threshold = 0.1);

} // namespace ionthermo
