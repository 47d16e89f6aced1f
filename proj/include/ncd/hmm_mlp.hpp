#ifndef NCD_HMM_MLP_HPP
#define NCD_HMM_MLP_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/mlp.hpp"

namespace ncd {

/// Regime-switching autoregression: a hidden Markov chain X_t over N states
/// picks the active regressor and noise scale,
///   Y_{t+1} = F_{X_{t+1}}(Y_t, ..., Y_{t-p+1}) + sigma_{X_{t+1}} * eps_{t+1}
/// with iid standard Gaussian eps.
struct HmmMlpParams {
    std::size_t state_count = 0; // N
    std::size_t order = 0;       // p, autoregressive inputs per regressor
    Matrix transition;           // N x N, rows sum to 1
    std::vector<double> initial; // length N, sums to 1
    std::vector<MlpParams> regressors;  // N, each with input_dim == order
    std::vector<double> noise_scales;   // N; zero is representable but only
                                        // simulation accepts it

    /// Throws InvalidInput on shape mismatches, rows not summing to 1 within
    /// 1e-12, or negative noise scales.
    void validate() const;
};

struct SimulatedSeries {
    std::vector<double> values;      // length T
    std::vector<std::size_t> states; // length T, hidden path
};

/// Draws a hidden path from (initial, transition) and emits values by the
/// model recursion. warm_start supplies the p conditioning values in
/// chronological order (oldest first). Deterministic given the seed.
SimulatedSeries simulate(const HmmMlpParams& params, std::size_t length,
                         std::span<const double> warm_start, std::uint64_t seed);

/// Exact log p(series | warm_start): Gaussian-emission forward recursion in
/// log space. Throws NumericError naming the time index if every state's
/// density vanishes there (e.g. a zero noise scale).
double forward_log_likelihood(const HmmMlpParams& params, std::span<const double> series,
                              std::span<const double> warm_start);

/// Most probable hidden path given the observations; ties break toward the
/// lower state index at every step.
std::vector<std::size_t> viterbi_decode(const HmmMlpParams& params,
                                        std::span<const double> series,
                                        std::span<const double> warm_start);

struct GemConfig {
    std::size_t iterations = 50;     // outer E/M rounds
    std::size_t hidden_count = 2;    // hidden units per regressor
    int refine_iterations = 8;       // bounded regressor descent per M-step
    double sigma_floor = 1e-6;       // lower bound on fitted noise scales
    TrainConfig train;               // initial per-state regressor fit
};

struct GemResult {
    HmmMlpParams params;
    std::vector<double> log_likelihood_trace; // before each round + final
    std::vector<std::string> warnings;        // e.g. state collapse
};

/// Generalized EM fit. The E-step runs exact forward-backward posteriors;
/// the M-step reestimates (initial, transition) in closed form, improves each
/// regressor by bounded posterior-weighted descent, and sets each noise
/// variance to the posterior-weighted mean squared residual (floored). The
/// first p observations are conditioning context and are not modeled.
GemResult gem_fit(std::span<const double> series, std::size_t state_count, std::size_t order,
                  const GemConfig& config, std::uint64_t seed);

} // namespace ncd

#endif
