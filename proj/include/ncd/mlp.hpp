#ifndef NCD_MLP_HPP
#define NCD_MLP_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "ncd/common.hpp"

namespace ncd {

enum class Transfer { Tanh, Logistic };

double apply_transfer(Transfer t, double x);
double transfer_derivative(Transfer t, double x);

/// One-hidden-layer perceptron
///   F(x) = intercept + sum_i output_weights[i] * psi(hidden_weights[i] . x + hidden_biases[i])
/// with a bounded transfer psi (tanh or logistic).
struct MlpParams {
    std::size_t input_dim = 0;
    std::vector<std::vector<double>> hidden_weights; // k rows of length input_dim
    std::vector<double> hidden_biases;               // k
    std::vector<double> output_weights;              // k
    double intercept = 0.0;
    Transfer transfer = Transfer::Tanh;

    std::size_t hidden_count() const { return hidden_weights.size(); }

    /// Flattened parameter count: k * (p + 2) + 1.
    std::size_t parameter_count() const { return hidden_count() * (input_dim + 2) + 1; }

    /// Throws InvalidInput unless k >= 1, p >= 1 and all containers agree on k and p.
    void validate() const;
};

struct TrainingPair {
    std::vector<double> input;
    double target = 0.0;
};

double mlp_forward(const MlpParams& params, std::span<const double> x);

/// Mean squared error over the pairs. Rejects an empty list.
double mse_loss(const MlpParams& params, const std::vector<TrainingPair>& pairs);

/// Gradient of mse_loss with respect to the flattened parameters, ordered
/// (w_1,...,w_k, b_1,...,b_k, a_1,...,a_k, intercept).
std::vector<double> backprop_gradient(const MlpParams& params,
                                      const std::vector<TrainingPair>& pairs);

/// Weighted variants used by posterior-weighted refits. Weights must be
/// nonnegative with a positive sum; the loss is sum_i w_i r_i^2 / sum_i w_i.
double weighted_mse_loss(const MlpParams& params, const std::vector<TrainingPair>& pairs,
                         std::span<const double> weights);
std::vector<double> weighted_backprop_gradient(const MlpParams& params,
                                               const std::vector<TrainingPair>& pairs,
                                               std::span<const double> weights);

std::vector<double> flatten_parameters(const MlpParams& params);
MlpParams unflatten_parameters(std::size_t input_dim, std::size_t hidden_count,
                               Transfer transfer, std::span<const double> flat);

struct TrainConfig {
    int max_iterations = 400;   // gradient steps per restart
    int restarts = 5;
    double gradient_tolerance = 1e-10;
    double initial_step = 1.0;
    double init_scale = 0.7;    // hidden weights init on [-s, s] / sqrt(p)
    Transfer transfer = Transfer::Tanh;
};

struct TrainResult {
    MlpParams params;
    double loss = 0.0;
    int restart_index = 0;              // restart that produced the kept model
    std::vector<int> diverged_restarts; // restarts abandoned on non-finite loss
};

/// Full-batch gradient descent with backtracking line search, best of
/// config.restarts seeded restarts (ties keep the lowest restart index).
/// Deterministic given the seed. Throws TrainingDiverged if every restart
/// hits a non-finite loss.
TrainResult train_mlp(const std::vector<TrainingPair>& pairs, std::size_t hidden_count,
                      const TrainConfig& config, std::uint64_t seed);

/// Improvement-only line-search descent from the current parameters under the
/// given weights; params is updated in place. Returns the final weighted loss.
/// The loss never increases. Used as the bounded M-step of the hybrid model.
double refine_mlp(MlpParams& params, const std::vector<TrainingPair>& pairs,
                  std::span<const double> weights, int max_iterations);

/// Autoregressive embedding: pair t has input (Y_{t-1},...,Y_{t-p}), newest
/// first, and target Y_t. Produces exactly T - p pairs; requires T > p >= 1.
std::vector<TrainingPair> embed_autoregressive(std::span<const double> series, std::size_t p);

/// Neuron on sampled functional inputs: psi(bias + sum_g q_g * f_g * w_g),
/// the quadrature weights q discretizing the integration measure.
struct FunctionalNeuron {
    std::vector<double> grid_points;        // strictly increasing
    std::vector<double> quadrature_weights; // nonnegative, positive sum
    std::vector<double> weight_samples;     // w sampled on the grid
    double bias = 0.0;
    Transfer transfer = Transfer::Tanh;

    void validate() const;
};

/// Trapezoid-rule weights for an increasing grid; the default quadrature.
std::vector<double> trapezoid_weights(std::span<const double> grid);

double functional_neuron_forward(const FunctionalNeuron& neuron,
                                 std::span<const double> f_samples);

} // namespace ncd

#endif
