#include "ncd/model_selection.hpp"

#include <cmath>
#include <string>

namespace ncd {

double penalty_value(const PenaltySpec& spec, double mse, std::size_t n) {
    if (n < 2) throw InvalidInput("penalty_value: sample count must be >= 2");
    if (mse < 0.0) throw InvalidInput("penalty_value: mse must be nonnegative");
    if (spec.multiplier <= 0.0) throw InvalidInput("penalty_value: multiplier must be positive");
    const double nd = static_cast<double>(n);
    double value = 0.0;
    switch (spec.kind) {
    case PenaltyKind::LogOverN:
        value = spec.multiplier * mse * std::log(nd) / nd;
        break;
    case PenaltyKind::SqrtOverN:
        value = spec.multiplier * mse * std::sqrt(nd) / nd;
        break;
    case PenaltyKind::Custom:
        if (!spec.custom) throw InvalidInput("penalty_value: custom penalty has no rule");
        value = spec.multiplier * spec.custom(mse, n);
        break;
    }
    if (value < 0.0) throw InvalidInput("penalty_value: penalty must be nonnegative");
    return value;
}

double bic_score(double mse, std::size_t parameter_count, std::size_t n) {
    if (mse <= 0.0)
        throw InvalidInput("bic_score: mse must be strictly positive (a perfect fit has no finite BIC)");
    if (parameter_count < 1) throw InvalidInput("bic_score: parameter count must be >= 1");
    if (n < 2) throw InvalidInput("bic_score: sample count must be >= 2");
    const double nd = static_cast<double>(n);
    return nd * std::log(mse) + static_cast<double>(parameter_count) * std::log(nd);
}

SelectionResult select_hidden_units(const std::vector<TrainingPair>& pairs, std::size_t max_k,
                                    const PenaltySpec& penalty, const TrainConfig& config,
                                    std::uint64_t seed, const Trainer& trainer) {
    if (max_k < 1) throw InvalidInput("select_hidden_units: max_k must be >= 1");
    if (pairs.empty()) throw InvalidInput("select_hidden_units: training pair list is empty");
    const Trainer& train = trainer
        ? trainer
        : static_cast<const Trainer&>(Trainer(
              [](const std::vector<TrainingPair>& p, std::size_t k, const TrainConfig& c,
                 std::uint64_t s) { return train_mlp(p, k, c, s); }));

    SelectionResult result;
    TrainResult best;
    double previous_score = 0.0;

    for (std::size_t k = 1; k <= max_k; ++k) {
        TrainResult fit;
        try {
            fit = train(pairs, k, config, derive_seed(seed, k));
        } catch (const TrainingDiverged& e) {
            throw TrainingDiverged("selection aborted at k = " + std::to_string(k) + ": " +
                                   e.what(), e.diverged_restarts());
        }
        SelectionRow row;
        row.k = k;
        row.mse = fit.loss;
        row.penalty = penalty_value(penalty, fit.loss, pairs.size());
        row.score = row.mse + row.penalty;
        result.trace.per_k.push_back(row);

        if (k > 1 && row.score > previous_score) break; // first strict increase: keep k - 1

        previous_score = row.score;
        result.trace.chosen_k = k;
        best = std::move(fit);
    }

    result.model = std::move(best.params);
    result.mse = best.loss;
    return result;
}

} // namespace ncd
