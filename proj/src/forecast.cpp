#include "ncd/forecast.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace ncd {

void TwoScaleSeries::validate() const {
    if (values.rows() == 0) throw InvalidInput("two-scale series: no slow steps");
    if (values.cols() == 0) throw InvalidInput("two-scale series: empty fast scale");
    if (metadata.size() != values.rows())
        throw InvalidInput("two-scale series: " + std::to_string(metadata.size()) +
                           " metadata labels for " + std::to_string(values.rows()) +
                           " slow steps");
}

ProfileDecomposition decompose_profiles(const TwoScaleSeries& series) {
    series.validate();
    const std::size_t j_count = series.values.rows();
    const std::size_t h = series.values.cols();
    if (h < 2) throw InvalidInput("decompose_profiles: need at least two fast values per step");

    ProfileDecomposition out;
    out.means.resize(j_count);
    out.scales.resize(j_count);
    out.profiles = Matrix(j_count, h);
    out.degenerate.assign(j_count, false);

    for (std::size_t j = 0; j < j_count; ++j) {
        const auto row = series.values.row(j);
        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(h);
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(h);
        const double sigma = std::sqrt(var);

        out.means[j] = mean;
        out.scales[j] = sigma;
        if (sigma == 0.0) {
            out.degenerate[j] = true; // profile row stays zero
            continue;
        }
        auto q = out.profiles.row(j);
        for (std::size_t i = 0; i < h; ++i) q[i] = (row[i] - mean) / sigma;
    }
    return out;
}

std::size_t MetadataMap::total() const {
    std::size_t n = 0;
    for (const auto& neuron : counts)
        for (const auto& [label, count] : neuron) n += count;
    return n;
}

std::size_t MetadataMap::label_count(std::size_t neuron, const std::string& label) const {
    if (neuron >= counts.size()) throw InvalidInput("metadata map: neuron index out of range");
    const auto it = counts[neuron].find(label);
    return it == counts[neuron].end() ? 0 : it->second;
}

ProfileSomResult train_profile_som(const ProfileDecomposition& decomposition,
                                   const std::vector<std::string>& metadata,
                                   const MapLattice& lattice,
                                   const NeighborhoodSchedule& schedule, std::uint64_t seed) {
    const std::size_t j_count = decomposition.profiles.rows();
    if (metadata.size() != j_count)
        throw InvalidInput("train_profile_som: metadata length does not match the decomposition");

    ProfileSomResult result;
    for (std::size_t j = 0; j < j_count; ++j)
        if (!decomposition.degenerate[j]) result.trained_rows.push_back(j);
    if (result.trained_rows.empty())
        throw InvalidInput("train_profile_som: every profile is degenerate (constant rows)");

    Matrix training(result.trained_rows.size(), decomposition.profiles.cols());
    for (std::size_t r = 0; r < result.trained_rows.size(); ++r) {
        const auto src = decomposition.profiles.row(result.trained_rows[r]);
        std::copy(src.begin(), src.end(), training.row(r).begin());
    }

    result.map = batch_som_train(training, lattice, schedule, seed);
    result.metadata.counts.assign(lattice.neuron_count(), {});
    for (std::size_t r = 0; r < result.trained_rows.size(); ++r)
        ++result.metadata.counts[result.map.assignments[r]][metadata[result.trained_rows[r]]];
    return result;
}

namespace {

// Least-squares AR(p) with intercept, fitted on the full history; returns the
// one-step-ahead prediction. Rank deficiency (e.g. constant history) is fine:
// any least-squares solution gives the same prediction on an exactly fitted
// history.
double ar_predict(std::span<const double> history, std::size_t p) {
    const std::size_t n = history.size();
    if (p == 0) throw InvalidInput("forecast_mean_var: autoregression order must be >= 1");
    if (n < 2 * p + 1)
        throw InvalidInput("forecast_mean_var: history length " + std::to_string(n) +
                           " too short for ar(" + std::to_string(p) + ") (need " +
                           std::to_string(2 * p + 1) + ")");
    const std::size_t rows = n - p;
    Eigen::MatrixXd x(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        x(t, 0) = 1.0;
        for (std::size_t l = 0; l < p; ++l) x(t, 1 + l) = history[p + t - 1 - l];
        y(t) = history[p + t];
    }
    const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(y);
    double prediction = coef(0);
    for (std::size_t l = 0; l < p; ++l) prediction += coef(1 + l) * history[n - 1 - l];
    return prediction;
}

} // namespace

std::pair<double, double> forecast_mean_var(std::span<const double> means,
                                            std::span<const double> scales,
                                            const ForecastMethod& method) {
    if (means.size() != scales.size())
        throw InvalidInput("forecast_mean_var: mean and scale histories differ in length");
    if (means.empty()) throw InvalidInput("forecast_mean_var: empty history");

    double mean_hat = 0.0;
    double scale_hat = 0.0;
    if (method.kind == ForecastMethod::Kind::SeasonalNaive) {
        if (method.period == 0)
            throw InvalidInput("forecast_mean_var: seasonal period must be >= 1");
        if (means.size() < method.period)
            throw InvalidInput("forecast_mean_var: history length " +
                               std::to_string(means.size()) + " shorter than period " +
                               std::to_string(method.period));
        mean_hat = means[means.size() - method.period];
        scale_hat = scales[scales.size() - method.period];
    } else {
        mean_hat = ar_predict(means, method.order);
        scale_hat = ar_predict(scales, method.order);
    }
    return {mean_hat, std::max(0.0, scale_hat)};
}

ProfilePrediction predict_profile(const std::string& label, const Matrix& prototypes,
                                  const MetadataMap& metadata) {
    if (prototypes.rows() == 0) throw InvalidInput("predict_profile: no prototypes");
    if (metadata.counts.size() != prototypes.rows())
        throw InvalidInput("predict_profile: metadata map does not match the prototype count");
    if (metadata.total() == 0) throw InvalidInput("predict_profile: empty metadata map");

    const std::size_t m = prototypes.rows();
    std::vector<double> weights(m, 0.0);
    double weight_sum = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
        weights[c] = static_cast<double>(metadata.label_count(c, label));
        weight_sum += weights[c];
    }

    ProfilePrediction prediction;
    if (weight_sum == 0.0) {
        prediction.fallback = true;
        for (std::size_t c = 0; c < m; ++c) {
            double total = 0.0;
            for (const auto& [l, count] : metadata.counts[c]) total += static_cast<double>(count);
            weights[c] = total;
            weight_sum += total;
        }
    }

    // Normalize first so a lone contributing neuron gets weight exactly 1
    // and returns its prototype unchanged.
    for (double& w : weights) w /= weight_sum;
    prediction.profile.assign(prototypes.cols(), 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        if (weights[c] == 0.0) continue;
        const auto p = prototypes.row(c);
        for (std::size_t i = 0; i < p.size(); ++i) prediction.profile[i] += weights[c] * p[i];
    }
    return prediction;
}

VectorForecast forecast_next_vector(const TwoScaleSeries& series, const std::string& next_label,
                                    const MapLattice& lattice,
                                    const NeighborhoodSchedule& schedule,
                                    const ForecastMethod& method, std::uint64_t seed) {
    const ProfileDecomposition decomposition = decompose_profiles(series);
    const ProfileSomResult trained =
        train_profile_som(decomposition, series.metadata, lattice, schedule, seed);
    const auto [mean_hat, scale_hat] =
        forecast_mean_var(decomposition.means, decomposition.scales, method);
    const ProfilePrediction profile =
        predict_profile(next_label, trained.map.prototypes, trained.metadata);

    VectorForecast forecast;
    forecast.mean = mean_hat;
    forecast.scale = scale_hat;
    forecast.fallback = profile.fallback;
    forecast.values.assign(series.values.cols(), mean_hat);
    for (std::size_t i = 0; i < forecast.values.size(); ++i)
        forecast.values[i] += scale_hat * profile.profile[i];
    return forecast;
}

} // namespace ncd
