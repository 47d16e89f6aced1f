#ifndef NCD_MODEL_SELECTION_HPP
#define NCD_MODEL_SELECTION_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "ncd/mlp.hpp"

namespace ncd {

enum class PenaltyKind { LogOverN, SqrtOverN, Custom };

/// Penalty family a(k, theta): LogOverN gives multiplier * mse * log(n) / n,
/// SqrtOverN gives multiplier * mse * sqrt(n) / n. Custom evaluates the
/// caller-supplied rule (still scaled by multiplier; must be nonnegative).
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::LogOverN;
    double multiplier = 1.0;
    std::function<double(double mse, std::size_t n)> custom;
};

double penalty_value(const PenaltySpec& spec, double mse, std::size_t n);

/// Gaussian-MSE form of BIC: n * ln(mse) + m * ln(n). Rejects mse <= 0.
double bic_score(double mse, std::size_t parameter_count, std::size_t n);

struct SelectionRow {
    std::size_t k = 0;
    double mse = 0.0;
    double penalty = 0.0;
    double score = 0.0; // mse + penalty, exactly
};

struct SelectionTrace {
    std::vector<SelectionRow> per_k;
    std::size_t chosen_k = 0;
};

struct SelectionResult {
    SelectionTrace trace;
    MlpParams model;   // trained model for chosen_k
    double mse = 0.0;
};

using Trainer = std::function<TrainResult(const std::vector<TrainingPair>&, std::size_t,
                                          const TrainConfig&, std::uint64_t)>;

/// Incremental hidden-unit selection: score k = 1, then grow k while the
/// penalized score does not increase (ties continue); stop at the first
/// strict increase or at max_k. Each candidate k trains from fresh restarts
/// seeded from (seed, k). A custom trainer can be injected for testing.
SelectionResult select_hidden_units(const std::vector<TrainingPair>& pairs, std::size_t max_k,
                                    const PenaltySpec& penalty, const TrainConfig& config,
                                    std::uint64_t seed, const Trainer& trainer = {});

} // namespace ncd

#endif
