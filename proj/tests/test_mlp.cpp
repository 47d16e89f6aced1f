#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/mlp.hpp"

using namespace ncd;

namespace {

MlpParams make_params(std::size_t input_dim, std::vector<std::vector<double>> w,
                      std::vector<double> b, std::vector<double> a, double beta,
                      Transfer transfer = Transfer::Tanh) {
    MlpParams p;
    p.input_dim = input_dim;
    p.hidden_weights = std::move(w);
    p.hidden_biases = std::move(b);
    p.output_weights = std::move(a);
    p.intercept = beta;
    p.transfer = transfer;
    p.validate();
    return p;
}

// Seeded random network and data, used by the gradient checks.
MlpParams random_params(Rng& rng, std::size_t input_dim, std::size_t hidden, Transfer transfer) {
    MlpParams p;
    p.input_dim = input_dim;
    p.transfer = transfer;
    for (std::size_t i = 0; i < hidden; ++i) {
        std::vector<double> w(input_dim);
        for (double& v : w) v = rng.uniform(-1.0, 1.0);
        p.hidden_weights.push_back(std::move(w));
        p.hidden_biases.push_back(rng.uniform(-1.0, 1.0));
        p.output_weights.push_back(rng.uniform(-1.0, 1.0));
    }
    p.intercept = rng.uniform(-1.0, 1.0);
    return p;
}

std::vector<TrainingPair> random_pairs(Rng& rng, std::size_t count, std::size_t input_dim) {
    std::vector<TrainingPair> pairs(count);
    for (auto& pair : pairs) {
        pair.input.resize(input_dim);
        for (double& v : pair.input) v = rng.uniform(-2.0, 2.0);
        pair.target = rng.uniform(-2.0, 2.0);
    }
    return pairs;
}

// Central-difference oracle for the loss gradient, step h on each coordinate.
std::vector<double> fd_gradient(const MlpParams& params, const std::vector<TrainingPair>& pairs,
                                double h) {
    const std::vector<double> flat = flatten_parameters(params);
    std::vector<double> grad(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        std::vector<double> plus = flat, minus = flat;
        plus[i] += h;
        minus[i] -= h;
        const MlpParams p_plus =
            unflatten_parameters(params.input_dim, params.hidden_count(), params.transfer, plus);
        const MlpParams p_minus =
            unflatten_parameters(params.input_dim, params.hidden_count(), params.transfer, minus);
        grad[i] = (mse_loss(p_plus, pairs) - mse_loss(p_minus, pairs)) / (2.0 * h);
    }
    return grad;
}

double max_relative_gap(const std::vector<double>& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double scale = std::max({std::abs(got[i]), std::abs(want[i]), 1e-8});
        worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    }
    return worst;
}

} // namespace

TEST_CASE("transfer functions and their derivatives") {
    CHECK(apply_transfer(Transfer::Tanh, 0.0) == 0.0);
    CHECK(apply_transfer(Transfer::Tanh, 1.0) == doctest::Approx(0.7615941559557649).epsilon(1e-15));
    CHECK(apply_transfer(Transfer::Logistic, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // Derivatives against central differences.
    for (double x : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
        for (Transfer t : {Transfer::Tanh, Transfer::Logistic}) {
            const double h = 1e-6;
            const double fd = (apply_transfer(t, x + h) - apply_transfer(t, x - h)) / (2.0 * h);
            CHECK(transfer_derivative(t, x) == doctest::Approx(fd).epsilon(1e-8));
        }
    }
}

TEST_CASE("forward pass trivial cases") {
    // All output weights zero: the network is the constant intercept.
    const MlpParams constant = make_params(1, {{0.3}}, {0.1}, {0.0}, 0.7);
    const std::vector<double> x{5.0};
    CHECK(mlp_forward(constant, x) == 0.7);

    // Zero hidden weight and bias under tanh contributes nothing.
    const MlpParams zeroed = make_params(1, {{0.0}}, {0.0}, {1.0}, 0.0);
    CHECK(mlp_forward(zeroed, x) == 0.0);
}

TEST_CASE("forward pass single tanh unit") {
    const MlpParams p = make_params(1, {{1.0}}, {0.0}, {1.0}, 0.0);
    const std::vector<double> x{1.0};
    CHECK(mlp_forward(p, x) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(mlp_forward(p, x) == doctest::Approx(0.7615941559557649).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatches") {
    const MlpParams p = make_params(2, {{1.0, -1.0}}, {0.0}, {1.0}, 0.0);
    const std::vector<double> bad{1.0};
    CHECK_THROWS_AS((void)mlp_forward(p, bad), InvalidInput);
}

TEST_CASE("output layer is affine in (a, beta)") {
    Rng rng(100);
    const MlpParams p = random_params(rng, 3, 4, Transfer::Tanh);
    const std::vector<double> x{0.4, -1.1, 0.9};
    const double base = mlp_forward(p, x);
    const double lambda = 2.75;
    MlpParams scaled = p;
    for (double& a : scaled.output_weights) a *= lambda;
    scaled.intercept *= lambda;
    CHECK(mlp_forward(scaled, x) == doctest::Approx(lambda * base).epsilon(1e-12));
}

TEST_CASE("mse_loss on explicit cases") {
    const MlpParams constant = make_params(1, {{0.0}}, {0.0}, {0.0}, 0.0);
    std::vector<TrainingPair> pairs;
    pairs.push_back({{0.0}, 1.0});
    pairs.push_back({{1.0}, -1.0});
    // Residuals are 1 and -1: mean square 1.
    CHECK(mse_loss(constant, pairs) == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<TrainingPair> one;
    one.push_back({{2.0}, 0.5});
    // Single residual 0.5 squared.
    CHECK(mse_loss(constant, one) == doctest::Approx(0.25).epsilon(1e-15));

    // Targets generated by the model itself fit perfectly.
    Rng rng(5);
    MlpParams p = random_params(rng, 2, 3, Transfer::Logistic);
    auto fitted = random_pairs(rng, 6, 2);
    for (auto& pair : fitted) pair.target = mlp_forward(p, pair.input);
    CHECK(mse_loss(p, fitted) == 0.0);

    CHECK_THROWS_AS((void)mse_loss(constant, {}), InvalidInput);
}

TEST_CASE("backprop matches central finite differences") {
    // A spread of seeded shapes; the relative gap uses an absolute floor so
    // near-zero coordinates do not inflate it.
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 9u, 10u}) {
        Rng rng(seed);
        const std::size_t input_dim = 1 + rng.uniform_index(4);
        const std::size_t hidden = 1 + rng.uniform_index(5);
        const Transfer transfer = (seed % 2 == 0) ? Transfer::Tanh : Transfer::Logistic;
        const MlpParams p = random_params(rng, input_dim, hidden, transfer);
        const auto pairs = random_pairs(rng, 8, input_dim);
        const auto analytic = backprop_gradient(p, pairs);
        const auto numeric = fd_gradient(p, pairs, 1e-5);
        CHECK(max_relative_gap(analytic, numeric) < 1e-5);
    }
}

TEST_CASE("gradient vanishes at a perfect fit") {
    Rng rng(21);
    const MlpParams p = random_params(rng, 2, 2, Transfer::Tanh);
    auto pairs = random_pairs(rng, 5, 2);
    for (auto& pair : pairs) pair.target = mlp_forward(p, pair.input);
    const auto grad = backprop_gradient(p, pairs);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    CHECK(std::sqrt(norm) < 1e-6);
}

TEST_CASE("duplicating every pair leaves the gradient unchanged") {
    Rng rng(33);
    const MlpParams p = random_params(rng, 3, 3, Transfer::Tanh);
    const auto pairs = random_pairs(rng, 7, 3);
    std::vector<TrainingPair> doubled = pairs;
    doubled.insert(doubled.end(), pairs.begin(), pairs.end());
    const auto g1 = backprop_gradient(p, pairs);
    const auto g2 = backprop_gradient(p, doubled);
    CHECK(max_relative_gap(g1, g2) < 1e-12);
}

TEST_CASE("weighted loss and gradient reduce to the plain ones under equal weights") {
    Rng rng(44);
    const MlpParams p = random_params(rng, 2, 3, Transfer::Logistic);
    const auto pairs = random_pairs(rng, 6, 2);
    const std::vector<double> weights(pairs.size(), 1.0);
    CHECK(weighted_mse_loss(p, pairs, weights) ==
          doctest::Approx(mse_loss(p, pairs)).epsilon(1e-14));
    const auto gw = weighted_backprop_gradient(p, pairs, weights);
    const auto g = backprop_gradient(p, pairs);
    CHECK(max_relative_gap(gw, g) < 1e-12);

    const std::vector<double> negative{1.0, -0.5, 1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS((void)weighted_mse_loss(p, pairs, negative), InvalidInput);
}

TEST_CASE("weighted gradient matches finite differences of the weighted loss") {
    Rng rng(55);
    const MlpParams p = random_params(rng, 2, 2, Transfer::Tanh);
    const auto pairs = random_pairs(rng, 5, 2);
    std::vector<double> weights(pairs.size());
    for (double& w : weights) w = rng.uniform(0.1, 2.0);

    const auto analytic = weighted_backprop_gradient(p, pairs, weights);
    const std::vector<double> flat = flatten_parameters(p);
    std::vector<double> numeric(flat.size());
    const double h = 1e-5;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        auto plus = flat, minus = flat;
        plus[i] += h;
        minus[i] -= h;
        numeric[i] = (weighted_mse_loss(unflatten_parameters(2, 2, Transfer::Tanh, plus), pairs,
                                        weights) -
                      weighted_mse_loss(unflatten_parameters(2, 2, Transfer::Tanh, minus), pairs,
                                        weights)) /
                     (2.0 * h);
    }
    CHECK(max_relative_gap(analytic, numeric) < 1e-5);
}

TEST_CASE("flatten orders parameters as (w, b, a, intercept)") {
    const MlpParams p = make_params(2, {{1.0, 2.0}, {3.0, 4.0}}, {5.0, 6.0}, {7.0, 8.0}, 9.0);
    const auto flat = flatten_parameters(p);
    REQUIRE(flat.size() == p.parameter_count());
    CHECK(flat == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0});
    const MlpParams back = unflatten_parameters(2, 2, Transfer::Tanh, flat);
    CHECK(flatten_parameters(back) == flat);
    CHECK(back.hidden_weights == p.hidden_weights);
    CHECK(back.intercept == 9.0);
}

TEST_CASE("parameter_count follows k * (p + 2) + 1") {
    const MlpParams p = make_params(3, {{0, 0, 0}, {0, 0, 0}}, {0, 0}, {0, 0}, 0.0);
    CHECK(p.parameter_count() == 2 * (3 + 2) + 1);
}

TEST_CASE("validate rejects inconsistent shapes") {
    MlpParams p;
    p.input_dim = 2;
    p.hidden_weights = {{1.0, 2.0}};
    p.hidden_biases = {0.0, 0.0}; // one bias too many
    p.output_weights = {1.0};
    CHECK_THROWS_AS(p.validate(), InvalidInput);

    MlpParams empty;
    empty.input_dim = 1;
    CHECK_THROWS_AS(empty.validate(), InvalidInput);
}

TEST_CASE("training is deterministic per seed") {
    Rng rng(77);
    auto pairs = random_pairs(rng, 30, 1);
    for (auto& pair : pairs) pair.target = std::tanh(1.3 * pair.input[0]);
    TrainConfig config;
    config.max_iterations = 60;
    config.restarts = 2;
    const TrainResult a = train_mlp(pairs, 2, config, 2024);
    const TrainResult b = train_mlp(pairs, 2, config, 2024);
    CHECK(flatten_parameters(a.params) == flatten_parameters(b.params));
    CHECK(a.loss == b.loss);
    CHECK(a.restart_index == b.restart_index);
}

TEST_CASE("training fits noise-free data generated by a small network") {
    Rng rng(88);
    std::vector<TrainingPair> pairs;
    for (int i = 0; i < 60; ++i) {
        const double x = -2.0 + 4.0 * i / 59.0;
        pairs.push_back({{x}, 0.4 + 1.2 * std::tanh(1.5 * x - 0.3)});
    }
    TrainConfig config;
    const TrainResult result = train_mlp(pairs, 1, config, 7);
    CHECK(result.loss < 1e-4);
}

TEST_CASE("training reproduces constant targets") {
    Rng rng(99);
    auto pairs = random_pairs(rng, 20, 2);
    for (auto& pair : pairs) pair.target = 3.7;
    TrainConfig config;
    config.restarts = 2;
    const TrainResult result = train_mlp(pairs, 1, config, 5);
    for (const auto& pair : pairs)
        CHECK(mlp_forward(result.params, pair.input) == doctest::Approx(3.7).epsilon(1e-6));
}

TEST_CASE("training reports divergence when every restart blows up") {
    // A target beyond 1e308 makes the squared residual overflow at any
    // bounded-network output, so every restart sees a non-finite loss.
    std::vector<TrainingPair> pairs;
    pairs.push_back({{0.5}, std::numeric_limits<double>::max()});
    pairs.push_back({{-0.5}, std::numeric_limits<double>::max()});
    TrainConfig config;
    config.restarts = 3;
    try {
        (void)train_mlp(pairs, 1, config, 1);
        FAIL("expected TrainingDiverged");
    } catch (const TrainingDiverged& e) {
        CHECK(e.diverged_restarts() == std::vector<int>{0, 1, 2});
    }
}

TEST_CASE("refine_mlp never increases the weighted loss") {
    Rng rng(123);
    auto pairs = random_pairs(rng, 15, 2);
    std::vector<double> weights(pairs.size());
    for (double& w : weights) w = rng.uniform(0.2, 1.5);
    MlpParams p = random_params(rng, 2, 2, Transfer::Tanh);
    const double before = weighted_mse_loss(p, pairs, weights);
    const double after = refine_mlp(p, pairs, weights, 25);
    CHECK(after <= before);
    CHECK(after == doctest::Approx(weighted_mse_loss(p, pairs, weights)).epsilon(1e-14));
}

TEST_CASE("autoregressive embedding enumerates lagged pairs") {
    const std::vector<double> series{1.0, 2.0, 3.0, 4.0, 5.0};
    const auto pairs = embed_autoregressive(series, 2);
    REQUIRE(pairs.size() == 3);
    // Inputs are newest first.
    CHECK(pairs[0].input == std::vector<double>{2.0, 1.0});
    CHECK(pairs[0].target == 3.0);
    CHECK(pairs[1].input == std::vector<double>{3.0, 2.0});
    CHECK(pairs[1].target == 4.0);
    CHECK(pairs[2].input == std::vector<double>{4.0, 3.0});
    CHECK(pairs[2].target == 5.0);
}

TEST_CASE("autoregressive embedding edge cases") {
    const std::vector<double> series{1.0, 2.0, 3.0};
    const auto single = embed_autoregressive(series, 2);
    REQUIRE(single.size() == 1);
    CHECK(single[0].input == std::vector<double>{2.0, 1.0});
    CHECK(single[0].target == 3.0);

    CHECK_THROWS_AS((void)embed_autoregressive(series, 3), InvalidInput);
    CHECK_THROWS_AS((void)embed_autoregressive(series, 0), InvalidInput);

    const std::vector<double> constant{2.0, 2.0, 2.0, 2.0};
    for (const auto& pair : embed_autoregressive(constant, 1)) {
        CHECK(pair.input == std::vector<double>{2.0});
        CHECK(pair.target == 2.0);
    }
}

TEST_CASE("embedding round-trips the series") {
    Rng rng(17);
    std::vector<double> series(12);
    for (double& v : series) v = rng.uniform(-1.0, 1.0);
    const std::size_t p = 3;
    const auto pairs = embed_autoregressive(series, p);
    REQUIRE(pairs.size() == series.size() - p);
    // First input reversed gives the first p values; targets give the rest.
    std::vector<double> rebuilt(pairs[0].input.rbegin(), pairs[0].input.rend());
    for (const auto& pair : pairs) rebuilt.push_back(pair.target);
    CHECK(rebuilt == series);
}

TEST_CASE("trapezoid weights on a uniform grid") {
    const std::vector<double> grid{0.0, 0.5, 1.0};
    const auto w = trapezoid_weights(grid);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w[2] == doctest::Approx(0.25).epsilon(1e-15));

    const std::vector<double> two{0.0, 1.0};
    const auto w2 = trapezoid_weights(two);
    CHECK(w2 == std::vector<double>{0.5, 0.5});

    const std::vector<double> bad{0.0, 0.0, 1.0};
    CHECK_THROWS_AS((void)trapezoid_weights(bad), InvalidInput);
}

TEST_CASE("functional neuron integrates a constant weight against f = 1") {
    // With f = 1 and w = 1 on [0, 1], the inner product is the integral of 1,
    // so the neuron returns tanh(1) up to quadrature error (exact for
    // constants under the trapezoid rule).
    FunctionalNeuron neuron;
    const std::size_t g = 11;
    for (std::size_t i = 0; i < g; ++i) neuron.grid_points.push_back(double(i) / double(g - 1));
    neuron.quadrature_weights = trapezoid_weights(neuron.grid_points);
    neuron.weight_samples.assign(g, 1.0);
    neuron.bias = 0.0;
    const std::vector<double> f(g, 1.0);
    CHECK(functional_neuron_forward(neuron, f) ==
          doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
}

TEST_CASE("functional neuron degenerates to psi(bias) on zero input") {
    FunctionalNeuron neuron;
    neuron.grid_points = {0.0, 1.0};
    neuron.quadrature_weights = trapezoid_weights(neuron.grid_points);
    neuron.weight_samples = {2.0, -1.0};
    neuron.bias = 0.3;
    const std::vector<double> zero(2, 0.0);
    CHECK(functional_neuron_forward(neuron, zero) ==
          doctest::Approx(std::tanh(0.3)).epsilon(1e-15));

    const std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS((void)functional_neuron_forward(neuron, wrong), InvalidInput);
}

TEST_CASE("functional neuron acts linearly inside the transfer") {
    // Dirac-like check: concentrating quadrature mass on one grid point makes
    // the inner product read off w * f there.
    FunctionalNeuron neuron;
    neuron.grid_points = {0.0, 0.5, 1.0};
    neuron.quadrature_weights = {0.0, 1.0, 0.0};
    neuron.weight_samples = {9.0, 0.25, -9.0};
    neuron.bias = 0.0;
    const std::vector<double> f{100.0, 2.0, 100.0};
    CHECK(functional_neuron_forward(neuron, f) ==
          doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
}
