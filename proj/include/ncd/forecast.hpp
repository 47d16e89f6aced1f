#ifndef NCD_FORECAST_HPP
#define NCD_FORECAST_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/som.hpp"

namespace ncd {

/// Series observed on two time scales: J slow steps of H fast values each,
/// with one metadata label per slow step (e.g. day type for a day of
/// half-hourly loads).
struct TwoScaleSeries {
    Matrix values;                     // J x H
    std::vector<std::string> metadata; // length J

    void validate() const;
};

/// Per-slow-step standardization c_j = mu_j + sigma_j * q_j with mu_j the row
/// mean and sigma_j the population standard deviation. Constant rows have
/// sigma 0; they are flagged degenerate and get a zero profile.
struct ProfileDecomposition {
    std::vector<double> means;    // J
    std::vector<double> scales;   // J, nonnegative
    Matrix profiles;              // J x H
    std::vector<bool> degenerate; // J
};

ProfileDecomposition decompose_profiles(const TwoScaleSeries& series);

/// Per-neuron multiset of the metadata labels of assigned profiles.
struct MetadataMap {
    std::vector<std::map<std::string, std::size_t>> counts; // per neuron

    std::size_t total() const;
    std::size_t label_count(std::size_t neuron, const std::string& label) const;
};

struct ProfileSomResult {
    BatchSomResult map;                    // trained on non-degenerate profiles
    MetadataMap metadata;
    std::vector<std::size_t> trained_rows; // slow indices that entered training
};

/// Clusters the non-degenerate profiles with the batch SOM and attaches each
/// neuron the multiset of metadata labels it attracted. Rejects input when
/// every row is degenerate.
ProfileSomResult train_profile_som(const ProfileDecomposition& decomposition,
                                   const std::vector<std::string>& metadata,
                                   const MapLattice& lattice,
                                   const NeighborhoodSchedule& schedule, std::uint64_t seed);

struct ForecastMethod {
    enum class Kind { SeasonalNaive, Ar };
    Kind kind = Kind::SeasonalNaive;
    std::size_t period = 1; // seasonal naive: value one period back
    std::size_t order = 1;  // autoregression order
};

/// One-step forecast of the slow-scale mean and scale histories. The
/// seasonal-naive method returns the value one period back; the AR method
/// fits least-squares autoregressions with intercept. The forecast scale is
/// floored at 0.
std::pair<double, double> forecast_mean_var(std::span<const double> means,
                                            std::span<const double> scales,
                                            const ForecastMethod& method);

struct ProfilePrediction {
    std::vector<double> profile;
    bool fallback = false; // label unseen anywhere on the map
};

/// Count-weighted average of the prototypes of neurons holding the label.
/// An unseen label falls back to the assignment-count-weighted mean of all
/// prototypes, flagged. An empty map is rejected.
ProfilePrediction predict_profile(const std::string& label, const Matrix& prototypes,
                                  const MetadataMap& metadata);

struct VectorForecast {
    std::vector<double> values; // length H: mean + scale * profile
    double mean = 0.0;
    double scale = 0.0;
    bool fallback = false;
};

/// Full pipeline: decompose, cluster profiles, forecast mean/scale, predict
/// the next profile from the supplied metadata label, and recompose.
VectorForecast forecast_next_vector(const TwoScaleSeries& series, const std::string& next_label,
                                    const MapLattice& lattice,
                                    const NeighborhoodSchedule& schedule,
                                    const ForecastMethod& method, std::uint64_t seed);

} // namespace ncd

#endif
