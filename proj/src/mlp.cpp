#include "ncd/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ncd {

double apply_transfer(Transfer t, double x) {
    switch (t) {
    case Transfer::Tanh: return std::tanh(x);
    case Transfer::Logistic: return 1.0 / (1.0 + std::exp(-x));
    }
    throw InvalidInput("unknown transfer function");
}

double transfer_derivative(Transfer t, double x) {
    switch (t) {
    case Transfer::Tanh: {
        const double y = std::tanh(x);
        return 1.0 - y * y;
    }
    case Transfer::Logistic: {
        const double y = 1.0 / (1.0 + std::exp(-x));
        return y * (1.0 - y);
    }
    }
    throw InvalidInput("unknown transfer function");
}

void MlpParams::validate() const {
    if (input_dim == 0) throw InvalidInput("MlpParams: input_dim must be >= 1");
    const std::size_t k = hidden_weights.size();
    if (k == 0) throw InvalidInput("MlpParams: at least one hidden unit required");
    for (std::size_t i = 0; i < k; ++i)
        if (hidden_weights[i].size() != input_dim)
            throw InvalidInput("MlpParams: hidden weight vector " + std::to_string(i) +
                               " has length " + std::to_string(hidden_weights[i].size()) +
                               ", expected " + std::to_string(input_dim));
    if (hidden_biases.size() != k || output_weights.size() != k)
        throw InvalidInput("MlpParams: biases and output weights must both have length k");
}

double mlp_forward(const MlpParams& params, std::span<const double> x) {
    if (x.size() != params.input_dim)
        throw InvalidInput("mlp_forward: input has length " + std::to_string(x.size()) +
                           ", expected " + std::to_string(params.input_dim));
    double out = params.intercept;
    for (std::size_t i = 0; i < params.hidden_count(); ++i) {
        double z = params.hidden_biases[i];
        const auto& w = params.hidden_weights[i];
        for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
        out += params.output_weights[i] * apply_transfer(params.transfer, z);
    }
    return out;
}

namespace {

void check_pairs(const MlpParams& params, const std::vector<TrainingPair>& pairs) {
    if (pairs.empty()) throw InvalidInput("training pair list is empty");
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].input.size() != params.input_dim)
            throw InvalidInput("training pair " + std::to_string(i) + " has input length " +
                               std::to_string(pairs[i].input.size()) + ", expected " +
                               std::to_string(params.input_dim));
}

void check_weights(const std::vector<TrainingPair>& pairs, std::span<const double> weights) {
    if (weights.size() != pairs.size())
        throw InvalidInput("weight vector length does not match pair count");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidInput("weights must be nonnegative");
        sum += w;
    }
    if (sum <= 0.0) throw InvalidInput("weights must have a positive sum");
}

double loss_impl(const MlpParams& params, const std::vector<TrainingPair>& pairs,
                 const double* weights) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double w = weights ? weights[i] : 1.0;
        const double r = pairs[i].target - mlp_forward(params, pairs[i].input);
        num += w * r * r;
        den += w;
    }
    return num / den;
}

// Gradient layout matches flatten_parameters: w blocks, then b, a, intercept.
std::vector<double> gradient_impl(const MlpParams& params, const std::vector<TrainingPair>& pairs,
                                  const double* weights) {
    const std::size_t k = params.hidden_count();
    const std::size_t p = params.input_dim;
    std::vector<double> grad(params.parameter_count(), 0.0);
    std::vector<double> pre(k);   // pre-activations
    std::vector<double> act(k);   // psi(pre)
    double weight_sum = 0.0;

    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const double wn = weights ? weights[n] : 1.0;
        weight_sum += wn;
        const auto& x = pairs[n].input;
        double out = params.intercept;
        for (std::size_t i = 0; i < k; ++i) {
            double z = params.hidden_biases[i];
            for (std::size_t j = 0; j < p; ++j) z += params.hidden_weights[i][j] * x[j];
            pre[i] = z;
            act[i] = apply_transfer(params.transfer, z);
            out += params.output_weights[i] * act[i];
        }
        const double scale = 2.0 * wn * (out - pairs[n].target);
        for (std::size_t i = 0; i < k; ++i) {
            const double through = scale * params.output_weights[i] *
                                   transfer_derivative(params.transfer, pre[i]);
            double* wgrad = grad.data() + i * p;
            for (std::size_t j = 0; j < p; ++j) wgrad[j] += through * x[j];
            grad[k * p + i] += through;          // bias
            grad[k * p + k + i] += scale * act[i]; // output weight
        }
        grad[k * p + 2 * k] += scale; // intercept
    }
    for (double& g : grad) g /= weight_sum;
    return grad;
}

} // namespace

double mse_loss(const MlpParams& params, const std::vector<TrainingPair>& pairs) {
    params.validate();
    check_pairs(params, pairs);
    return loss_impl(params, pairs, nullptr);
}

std::vector<double> backprop_gradient(const MlpParams& params,
                                      const std::vector<TrainingPair>& pairs) {
    params.validate();
    check_pairs(params, pairs);
    return gradient_impl(params, pairs, nullptr);
}

double weighted_mse_loss(const MlpParams& params, const std::vector<TrainingPair>& pairs,
                         std::span<const double> weights) {
    params.validate();
    check_pairs(params, pairs);
    check_weights(pairs, weights);
    return loss_impl(params, pairs, weights.data());
}

std::vector<double> weighted_backprop_gradient(const MlpParams& params,
                                               const std::vector<TrainingPair>& pairs,
                                               std::span<const double> weights) {
    params.validate();
    check_pairs(params, pairs);
    check_weights(pairs, weights);
    return gradient_impl(params, pairs, weights.data());
}

std::vector<double> flatten_parameters(const MlpParams& params) {
    std::vector<double> flat;
    flat.reserve(params.parameter_count());
    for (const auto& w : params.hidden_weights) flat.insert(flat.end(), w.begin(), w.end());
    flat.insert(flat.end(), params.hidden_biases.begin(), params.hidden_biases.end());
    flat.insert(flat.end(), params.output_weights.begin(), params.output_weights.end());
    flat.push_back(params.intercept);
    return flat;
}

MlpParams unflatten_parameters(std::size_t input_dim, std::size_t hidden_count,
                               Transfer transfer, std::span<const double> flat) {
    if (flat.size() != hidden_count * (input_dim + 2) + 1)
        throw InvalidInput("unflatten_parameters: flat vector has length " +
                           std::to_string(flat.size()) + ", expected " +
                           std::to_string(hidden_count * (input_dim + 2) + 1));
    MlpParams params;
    params.input_dim = input_dim;
    params.transfer = transfer;
    params.hidden_weights.resize(hidden_count);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < hidden_count; ++i) {
        params.hidden_weights[i].assign(flat.begin() + pos, flat.begin() + pos + input_dim);
        pos += input_dim;
    }
    params.hidden_biases.assign(flat.begin() + pos, flat.begin() + pos + hidden_count);
    pos += hidden_count;
    params.output_weights.assign(flat.begin() + pos, flat.begin() + pos + hidden_count);
    pos += hidden_count;
    params.intercept = flat[pos];
    return params;
}

namespace {

double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

struct DescentOutcome {
    double loss = std::numeric_limits<double>::quiet_NaN();
    bool diverged = false;
};

// Armijo backtracking descent on the flattened parameters. Accepts only
// strictly sufficient decreases, so the loss is nonincreasing.
DescentOutcome descend(MlpParams& params, const std::vector<TrainingPair>& pairs,
                       const double* weights, int max_iterations, double initial_step,
                       double gradient_tolerance) {
    constexpr double armijo_c = 1e-4;
    constexpr int max_backtracks = 50;

    double loss = loss_impl(params, pairs, weights);
    if (!std::isfinite(loss)) return {loss, true};

    double step = initial_step;
    std::vector<double> flat = flatten_parameters(params);
    std::vector<double> candidate(flat.size());

    for (int iter = 0; iter < max_iterations; ++iter) {
        const std::vector<double> grad = gradient_impl(params, pairs, weights);
        const double gnorm2 = squared_norm(grad);
        if (!std::isfinite(gnorm2)) return {loss, true};
        if (gnorm2 <= gradient_tolerance * gradient_tolerance) break;

        double eta = std::min(step * 2.0, initial_step);
        bool accepted = false;
        for (int bt = 0; bt < max_backtracks; ++bt) {
            for (std::size_t i = 0; i < flat.size(); ++i)
                candidate[i] = flat[i] - eta * grad[i];
            const MlpParams trial = unflatten_parameters(params.input_dim, params.hidden_count(),
                                                         params.transfer, candidate);
            const double trial_loss = loss_impl(trial, pairs, weights);
            if (std::isfinite(trial_loss) && trial_loss <= loss - armijo_c * eta * gnorm2) {
                params = trial;
                flat = candidate;
                loss = trial_loss;
                step = eta;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break; // no acceptable step left
    }
    return {loss, false};
}

MlpParams random_init(std::size_t input_dim, std::size_t hidden_count, double init_scale,
                      Transfer transfer, Rng& rng) {
    MlpParams params;
    params.input_dim = input_dim;
    params.transfer = transfer;
    params.hidden_weights.resize(hidden_count);
    const double wscale = init_scale / std::sqrt(static_cast<double>(input_dim));
    const double ascale = init_scale / std::sqrt(static_cast<double>(hidden_count));
    for (auto& w : params.hidden_weights) {
        w.resize(input_dim);
        for (double& v : w) v = rng.uniform(-wscale, wscale);
    }
    params.hidden_biases.resize(hidden_count);
    for (double& b : params.hidden_biases) b = rng.uniform(-init_scale, init_scale);
    params.output_weights.resize(hidden_count);
    for (double& a : params.output_weights) a = rng.uniform(-ascale, ascale);
    params.intercept = rng.uniform(-init_scale, init_scale);
    return params;
}

} // namespace

TrainResult train_mlp(const std::vector<TrainingPair>& pairs, std::size_t hidden_count,
                      const TrainConfig& config, std::uint64_t seed) {
    if (hidden_count == 0) throw InvalidInput("train_mlp: hidden_count must be >= 1");
    if (pairs.empty()) throw InvalidInput("train_mlp: training pair list is empty");
    if (config.restarts < 1) throw InvalidInput("train_mlp: restarts must be >= 1");
    const std::size_t input_dim = pairs.front().input.size();
    if (input_dim == 0) throw InvalidInput("train_mlp: inputs must be nonempty");

    TrainResult best;
    bool have_best = false;
    std::vector<int> diverged;

    for (int r = 0; r < config.restarts; ++r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        MlpParams params = random_init(input_dim, hidden_count, config.init_scale,
                                       config.transfer, rng);
        check_pairs(params, pairs);
        const DescentOutcome outcome = descend(params, pairs, nullptr, config.max_iterations,
                                               config.initial_step, config.gradient_tolerance);
        if (outcome.diverged) {
            diverged.push_back(r);
            continue;
        }
        if (!have_best || outcome.loss < best.loss) {
            best.params = std::move(params);
            best.loss = outcome.loss;
            best.restart_index = r;
            have_best = true;
        }
    }

    if (!have_best) {
        std::string msg = "training diverged: non-finite loss in restart";
        for (std::size_t i = 0; i < diverged.size(); ++i)
            msg += (i ? ", " : " ") + std::to_string(diverged[i]);
        throw TrainingDiverged(msg, diverged);
    }
    best.diverged_restarts = std::move(diverged);
    return best;
}

double refine_mlp(MlpParams& params, const std::vector<TrainingPair>& pairs,
                  std::span<const double> weights, int max_iterations) {
    params.validate();
    check_pairs(params, pairs);
    check_weights(pairs, weights);
    const DescentOutcome outcome =
        descend(params, pairs, weights.data(), max_iterations, 1.0, 1e-12);
    if (outcome.diverged)
        throw NumericError("refine_mlp: non-finite loss at the starting parameters");
    return outcome.loss;
}

std::vector<TrainingPair> embed_autoregressive(std::span<const double> series, std::size_t p) {
    if (p == 0) throw InvalidInput("embed_autoregressive: window must be >= 1");
    if (series.size() <= p)
        throw InvalidInput("embed_autoregressive: series length " + std::to_string(series.size()) +
                           " must exceed window " + std::to_string(p));
    std::vector<TrainingPair> pairs;
    pairs.reserve(series.size() - p);
    for (std::size_t t = p; t < series.size(); ++t) {
        TrainingPair pair;
        pair.input.resize(p);
        for (std::size_t j = 0; j < p; ++j) pair.input[j] = series[t - 1 - j];
        pair.target = series[t];
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

void FunctionalNeuron::validate() const {
    if (grid_points.size() < 1) throw InvalidInput("FunctionalNeuron: empty grid");
    for (std::size_t g = 1; g < grid_points.size(); ++g)
        if (grid_points[g] <= grid_points[g - 1])
            throw InvalidInput("FunctionalNeuron: grid points must be strictly increasing");
    if (quadrature_weights.size() != grid_points.size() ||
        weight_samples.size() != grid_points.size())
        throw InvalidInput("FunctionalNeuron: weight containers must match the grid length");
    double sum = 0.0;
    for (double q : quadrature_weights) {
        if (q < 0.0) throw InvalidInput("FunctionalNeuron: quadrature weights must be nonnegative");
        sum += q;
    }
    if (sum <= 0.0) throw InvalidInput("FunctionalNeuron: quadrature weights must have positive sum");
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
    if (grid.size() < 2) throw InvalidInput("trapezoid_weights: need at least two grid points");
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
        const double h = grid[g + 1] - grid[g];
        if (h <= 0.0) throw InvalidInput("trapezoid_weights: grid must be strictly increasing");
        w[g] += 0.5 * h;
        w[g + 1] += 0.5 * h;
    }
    return w;
}

double functional_neuron_forward(const FunctionalNeuron& neuron,
                                 std::span<const double> f_samples) {
    neuron.validate();
    if (f_samples.size() != neuron.grid_points.size())
        throw InvalidInput("functional_neuron_forward: sample vector has length " +
                           std::to_string(f_samples.size()) + ", expected " +
                           std::to_string(neuron.grid_points.size()));
    double integral = 0.0;
    for (std::size_t g = 0; g < f_samples.size(); ++g)
        integral += neuron.quadrature_weights[g] * f_samples[g] * neuron.weight_samples[g];
    return apply_transfer(neuron.transfer, neuron.bias + integral);
}

} // namespace ncd
