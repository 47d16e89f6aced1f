#include "ncd/hmm_mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ncd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.9189385332046727; // 0.5 * log(2 * pi)

double log_normal_density(double y, double mean, double sigma) {
    if (!(sigma > 0.0)) return kNegInf;
    const double z = (y - mean) / sigma;
    return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z;
}

// Regressor input for the emission at chronological position t (0-based over
// `values`, the concatenation warm_start + series): newest value first.
std::vector<double> lag_input(const std::vector<double>& values, std::size_t t, std::size_t p) {
    std::vector<double> input(p);
    for (std::size_t j = 0; j < p; ++j) input[j] = values[t - 1 - j];
    return input;
}

// T x N log emission densities for the series given the conditioning values.
Matrix log_emissions(const HmmMlpParams& params, std::span<const double> series,
                     std::span<const double> warm_start) {
    const std::size_t n = params.state_count;
    const std::size_t p = params.order;
    std::vector<double> values(warm_start.begin(), warm_start.end());
    values.insert(values.end(), series.begin(), series.end());

    Matrix logb(series.size(), n);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const std::vector<double> input = lag_input(values, p + t, p);
        for (std::size_t i = 0; i < n; ++i) {
            const double mean = mlp_forward(params.regressors[i], input);
            logb(t, i) = log_normal_density(series[t], mean, params.noise_scales[i]);
        }
    }
    return logb;
}

void check_inputs(const HmmMlpParams& params, std::span<const double> series,
                  std::span<const double> warm_start) {
    params.validate();
    if (warm_start.size() != params.order)
        throw InvalidInput("hybrid model: warm start must supply exactly " +
                           std::to_string(params.order) + " values, got " +
                           std::to_string(warm_start.size()));
    if (series.empty()) throw InvalidInput("hybrid model: empty series");
}

std::vector<double> log_of(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] > 0.0 ? std::log(v[i]) : kNegInf;
    return out;
}

Matrix log_of(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) = m(i, j) > 0.0 ? std::log(m(i, j)) : kNegInf;
    return out;
}

} // namespace

void HmmMlpParams::validate() const {
    if (state_count == 0) throw InvalidInput("HmmMlpParams: state count must be >= 1");
    if (order == 0) throw InvalidInput("HmmMlpParams: order must be >= 1");
    if (transition.rows() != state_count || transition.cols() != state_count)
        throw InvalidInput("HmmMlpParams: transition matrix must be state_count x state_count");
    if (initial.size() != state_count)
        throw InvalidInput("HmmMlpParams: initial distribution length must equal state count");
    if (regressors.size() != state_count || noise_scales.size() != state_count)
        throw InvalidInput("HmmMlpParams: need one regressor and one noise scale per state");

    constexpr double kTol = 1e-12;
    double pi_sum = 0.0;
    for (double v : initial) {
        if (v < 0.0) throw InvalidInput("HmmMlpParams: negative initial probability");
        pi_sum += v;
    }
    if (std::abs(pi_sum - 1.0) > kTol)
        throw InvalidInput("HmmMlpParams: initial distribution sums to " + std::to_string(pi_sum));
    for (std::size_t i = 0; i < state_count; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < state_count; ++j) {
            if (transition(i, j) < 0.0)
                throw InvalidInput("HmmMlpParams: negative transition probability");
            row_sum += transition(i, j);
        }
        if (std::abs(row_sum - 1.0) > kTol)
            throw InvalidInput("HmmMlpParams: transition row " + std::to_string(i) +
                               " sums to " + std::to_string(row_sum));
        regressors[i].validate();
        if (regressors[i].input_dim != order)
            throw InvalidInput("HmmMlpParams: regressor " + std::to_string(i) +
                               " input dimension does not match the order");
        if (noise_scales[i] < 0.0)
            throw InvalidInput("HmmMlpParams: negative noise scale for state " + std::to_string(i));
    }
}

SimulatedSeries simulate(const HmmMlpParams& params, std::size_t length,
                         std::span<const double> warm_start, std::uint64_t seed) {
    params.validate();
    if (warm_start.size() != params.order)
        throw InvalidInput("simulate: warm start must supply exactly " +
                           std::to_string(params.order) + " values");
    if (length == 0) throw InvalidInput("simulate: length must be >= 1");

    Rng rng(derive_seed(seed, 0x53494dULL));
    const auto draw_state = [&](std::span<const double> probabilities) {
        const double u = rng.uniform01();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
            cum += probabilities[i];
            if (u < cum) return i;
        }
        return probabilities.size() - 1;
    };

    SimulatedSeries out;
    out.values.reserve(length);
    out.states.reserve(length);
    std::vector<double> values(warm_start.begin(), warm_start.end());

    std::size_t state = draw_state(params.initial);
    for (std::size_t t = 0; t < length; ++t) {
        if (t > 0) state = draw_state(params.transition.row(state));
        const std::vector<double> input = lag_input(values, values.size(), params.order);
        const double mean = mlp_forward(params.regressors[state], input);
        const double y = mean + params.noise_scales[state] * rng.normal();
        out.values.push_back(y);
        out.states.push_back(state);
        values.push_back(y);
    }
    return out;
}

double forward_log_likelihood(const HmmMlpParams& params, std::span<const double> series,
                              std::span<const double> warm_start) {
    check_inputs(params, series, warm_start);
    const std::size_t n = params.state_count;
    const Matrix logb = log_emissions(params, series, warm_start);
    const std::vector<double> log_pi = log_of(params.initial);
    const Matrix log_a = log_of(params.transition);

    std::vector<double> alpha(n), next(n), terms(n);
    for (std::size_t i = 0; i < n; ++i) alpha[i] = log_pi[i] + logb(0, i);
    if (!std::isfinite(log_sum_exp(alpha)))
        throw NumericError("forward recursion: vanishing density at time index 0");

    for (std::size_t t = 1; t < series.size(); ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) terms[i] = alpha[i] + log_a(i, j);
            next[j] = logb(t, j) + log_sum_exp(terms);
        }
        alpha = next;
        if (!std::isfinite(log_sum_exp(alpha)))
            throw NumericError("forward recursion: vanishing density at time index " +
                               std::to_string(t));
    }
    return log_sum_exp(alpha);
}

std::vector<std::size_t> viterbi_decode(const HmmMlpParams& params,
                                        std::span<const double> series,
                                        std::span<const double> warm_start) {
    check_inputs(params, series, warm_start);
    const std::size_t n = params.state_count;
    const std::size_t len = series.size();
    const Matrix logb = log_emissions(params, series, warm_start);
    const std::vector<double> log_pi = log_of(params.initial);
    const Matrix log_a = log_of(params.transition);

    Matrix delta(len, n);
    std::vector<std::vector<std::size_t>> back(len, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) delta(0, i) = log_pi[i] + logb(0, i);
    if (!std::isfinite(log_sum_exp(delta.row(0))))
        throw NumericError("viterbi: vanishing density at time index 0");

    for (std::size_t t = 1; t < len; ++t) {
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t arg = 0;
            double best = delta(t - 1, 0) + log_a(0, j);
            for (std::size_t i = 1; i < n; ++i) {
                const double v = delta(t - 1, i) + log_a(i, j);
                if (v > best) { // strict: ties keep the lower state
                    best = v;
                    arg = i;
                }
            }
            delta(t, j) = best + logb(t, j);
            back[t][j] = arg;
        }
        if (!std::isfinite(log_sum_exp(delta.row(t))))
            throw NumericError("viterbi: vanishing density at time index " + std::to_string(t));
    }

    std::vector<std::size_t> path(len, 0);
    std::size_t arg = 0;
    double best = delta(len - 1, 0);
    for (std::size_t i = 1; i < n; ++i)
        if (delta(len - 1, i) > best) {
            best = delta(len - 1, i);
            arg = i;
        }
    path[len - 1] = arg;
    for (std::size_t t = len - 1; t > 0; --t) path[t - 1] = back[t][path[t]];
    return path;
}

namespace {

struct Posteriors {
    double log_likelihood = 0.0;
    Matrix gamma;              // T x N state posteriors
    std::vector<Matrix> xi;    // T-1 matrices of N x N transition posteriors
};

Posteriors forward_backward(const HmmMlpParams& params, const Matrix& logb) {
    const std::size_t len = logb.rows();
    const std::size_t n = params.state_count;
    const std::vector<double> log_pi = log_of(params.initial);
    const Matrix log_a = log_of(params.transition);

    Matrix alpha(len, n), beta(len, n);
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) alpha(0, i) = log_pi[i] + logb(0, i);
    for (std::size_t t = 1; t < len; ++t)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) terms[i] = alpha(t - 1, i) + log_a(i, j);
            alpha(t, j) = logb(t, j) + log_sum_exp(terms);
        }
    const double loglik = log_sum_exp(alpha.row(len - 1));
    if (!std::isfinite(loglik))
        throw NumericError("forward-backward: vanishing density; non-finite log-likelihood");

    for (std::size_t i = 0; i < n; ++i) beta(len - 1, i) = 0.0;
    for (std::size_t t = len - 1; t > 0; --t)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                terms[j] = log_a(i, j) + logb(t, j) + beta(t, j);
            beta(t - 1, i) = log_sum_exp(terms);
        }

    Posteriors post;
    post.log_likelihood = loglik;
    post.gamma = Matrix(len, n);
    for (std::size_t t = 0; t < len; ++t)
        for (std::size_t i = 0; i < n; ++i)
            post.gamma(t, i) = std::exp(alpha(t, i) + beta(t, i) - loglik);

    post.xi.reserve(len > 0 ? len - 1 : 0);
    for (std::size_t t = 0; t + 1 < len; ++t) {
        Matrix x(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                x(i, j) = std::exp(alpha(t, i) + log_a(i, j) + logb(t + 1, j) +
                                   beta(t + 1, j) - loglik);
        post.xi.push_back(std::move(x));
    }
    return post;
}

} // namespace

GemResult gem_fit(std::span<const double> series, std::size_t state_count, std::size_t order,
                  const GemConfig& config, std::uint64_t seed) {
    if (state_count == 0) throw InvalidInput("gem_fit: state count must be >= 1");
    if (order == 0) throw InvalidInput("gem_fit: order must be >= 1");
    if (series.size() <= order + 1)
        throw InvalidInput("gem_fit: series length " + std::to_string(series.size()) +
                           " too short for order " + std::to_string(order) +
                           " (need at least order + 2 values)");
    if (config.hidden_count == 0) throw InvalidInput("gem_fit: hidden count must be >= 1");
    if (!(config.sigma_floor > 0.0)) throw InvalidInput("gem_fit: sigma floor must be positive");

    const std::size_t n = state_count;
    const std::vector<TrainingPair> pairs = embed_autoregressive(series, order);
    const std::size_t len = pairs.size();
    const std::span<const double> warm = series.subspan(0, order);
    const std::span<const double> emitted = series.subspan(order);

    GemResult result;
    HmmMlpParams& model = result.params;
    model.state_count = n;
    model.order = order;
    model.transition = Matrix(n, n);
    model.initial.assign(n, 0.0);
    model.noise_scales.assign(n, 0.0);
    model.regressors.resize(n);

    // Initial responsibilities from a 1-d clustering of the targets: purely
    // random soft weights leave every state fitting the same mixture (the
    // symmetric saddle of EM), while target clusters give each state its own
    // slice of the data. Seeded jitter keeps distinct seeds on distinct paths.
    Rng rng(derive_seed(seed, 0x47454dULL));
    Matrix resp(len, n);
    {
        std::vector<double> centers(n);
        std::vector<double> sorted_targets(len);
        for (std::size_t t = 0; t < len; ++t) sorted_targets[t] = pairs[t].target;
        std::sort(sorted_targets.begin(), sorted_targets.end());
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(n) *
                               static_cast<double>(len - 1);
            centers[i] = sorted_targets[static_cast<std::size_t>(pos)];
        }
        std::vector<std::size_t> labels(len, 0);
        for (int sweep = 0; sweep < 15; ++sweep) {
            for (std::size_t t = 0; t < len; ++t) {
                std::size_t best = 0;
                double best_d = std::abs(pairs[t].target - centers[0]);
                for (std::size_t i = 1; i < n; ++i) {
                    const double d = std::abs(pairs[t].target - centers[i]);
                    if (d < best_d) {
                        best_d = d;
                        best = i;
                    }
                }
                labels[t] = best;
            }
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t t = 0; t < len; ++t)
                    if (labels[t] == i) {
                        sum += pairs[t].target;
                        ++count;
                    }
                if (count > 0) centers[i] = sum / static_cast<double>(count);
            }
        }
        Matrix soft(len, n);
        for (std::size_t t = 0; t < len; ++t) {
            double row_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                soft(t, i) = (labels[t] == i ? 1.0 : 0.1) + 0.05 * rng.uniform01();
                row_sum += soft(t, i);
            }
            for (std::size_t i = 0; i < n; ++i) soft(t, i) /= row_sum;
        }
        resp = std::move(soft);
    }

    for (std::size_t i = 0; i < n; ++i) model.initial[i] = resp(0, i);
    for (std::size_t i = 0; i < n; ++i) {
        double denom = 0.0;
        for (std::size_t t = 0; t + 1 < len; ++t) {
            for (std::size_t j = 0; j < n; ++j) model.transition(i, j) += resp(t, i) * resp(t + 1, j);
            denom += resp(t, i);
        }
        if (denom > 0.0)
            for (std::size_t j = 0; j < n; ++j) model.transition(i, j) /= denom;
        else
            for (std::size_t j = 0; j < n; ++j)
                model.transition(i, j) = 1.0 / static_cast<double>(n);
        // Guard drift from the additive accumulation.
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) row_sum += model.transition(i, j);
        for (std::size_t j = 0; j < n; ++j) model.transition(i, j) /= row_sum;
    }

    std::vector<double> weights(len);
    for (std::size_t i = 0; i < n; ++i) {
        TrainResult fit = train_mlp(pairs, config.hidden_count, config.train,
                                    derive_seed(seed, 0x100 + i));
        model.regressors[i] = std::move(fit.params);
        for (std::size_t t = 0; t < len; ++t) weights[t] = resp(t, i);
        const double wmse = refine_mlp(model.regressors[i], pairs, weights,
                                       config.refine_iterations);
        model.noise_scales[i] = std::max(config.sigma_floor, std::sqrt(wmse));
    }

    // Generalized EM rounds. The trace holds the log-likelihood before every
    // round plus the final value; each round can only improve it (within
    // numerical tolerance) because every M-step piece improves the expected
    // complete-data log-likelihood.
    for (std::size_t round = 0; round < config.iterations; ++round) {
        const Matrix logb = log_emissions(model, emitted, warm);
        Posteriors post;
        try {
            post = forward_backward(model, logb);
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (round " + std::to_string(round) + ")");
        }
        result.log_likelihood_trace.push_back(post.log_likelihood);

        // gamma rows sum to 1 only up to accumulated rounding; renormalize so
        // the updated model still satisfies the simplex invariant.
        double pi_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) pi_sum += post.gamma(0, i);
        for (std::size_t i = 0; i < n; ++i) model.initial[i] = post.gamma(0, i) / pi_sum;

        for (std::size_t i = 0; i < n; ++i) {
            double denom = 0.0;
            std::vector<double> row(n, 0.0);
            for (std::size_t t = 0; t + 1 < len; ++t) {
                for (std::size_t j = 0; j < n; ++j) row[j] += post.xi[t](i, j);
                denom += post.gamma(t, i);
            }
            if (denom > 0.0) {
                double row_sum = 0.0;
                for (std::size_t j = 0; j < n; ++j) row_sum += row[j];
                if (row_sum > 0.0)
                    for (std::size_t j = 0; j < n; ++j) model.transition(i, j) = row[j] / row_sum;
            } else if (std::find(result.warnings.begin(), result.warnings.end(),
                                 "state " + std::to_string(i) + " collapsed: no posterior mass") ==
                       result.warnings.end()) {
                result.warnings.push_back("state " + std::to_string(i) +
                                          " collapsed: no posterior mass");
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            double mass = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                weights[t] = post.gamma(t, i);
                mass += weights[t];
            }
            if (mass <= 0.0) {
                const std::string w = "state " + std::to_string(i) + " collapsed: no posterior mass";
                if (std::find(result.warnings.begin(), result.warnings.end(), w) ==
                    result.warnings.end())
                    result.warnings.push_back(w);
                model.noise_scales[i] = std::max(model.noise_scales[i], config.sigma_floor);
                continue;
            }
            const double wmse = refine_mlp(model.regressors[i], pairs, weights,
                                           config.refine_iterations);
            model.noise_scales[i] = std::max(config.sigma_floor, std::sqrt(wmse));
        }
    }

    result.log_likelihood_trace.push_back(forward_log_likelihood(model, emitted, warm));
    return result;
}

} // namespace ncd
