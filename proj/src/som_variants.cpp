#include "ncd/som_variants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ncd {

double local_distortion(const DissimilarityMatrix& d, const std::vector<std::size_t>& assignments,
                        const Matrix& neighbor_weights, std::size_t neuron,
                        std::size_t candidate) {
    const std::size_t n = d.size();
    const std::size_t m = neighbor_weights.rows();
    if (assignments.size() != n)
        throw InvalidInput("local_distortion: assignment count does not match the matrix");
    if (neuron >= m) throw InvalidInput("local_distortion: neuron index out of range");
    if (candidate >= n) throw InvalidInput("local_distortion: candidate index out of range");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (assignments[i] >= m)
            throw InvalidInput("local_distortion: assignment " + std::to_string(assignments[i]) +
                               " out of range for observation " + std::to_string(i));
        total += neighbor_weights(assignments[i], neuron) * d(i, candidate);
    }
    return total;
}

namespace {

// Mean dissimilarity of observation i to a neuron's prototype set.
double set_dissimilarity(const DissimilarityMatrix& d, std::size_t i,
                         const std::vector<std::size_t>& prototypes) {
    double total = 0.0;
    for (std::size_t p : prototypes) total += d(i, p);
    return total / static_cast<double>(prototypes.size());
}

// Shared batch loop for the median map family. With q = 1 this is the plain
// median SOM; the set objective is separable over prototypes, so picking the
// q candidates of least local distortion is both the greedy forward
// selection and the exact q-subset optimum.
QMedianMapState q_median_engine(const DissimilarityMatrix& d, const MapLattice& lattice,
                                const NeighborhoodSchedule& schedule, std::size_t q,
                                std::uint64_t seed, bool stop_on_fixed_point,
                                std::vector<std::string> warnings,
                                const std::vector<std::size_t>* initial_prototypes) {
    schedule.validate();
    const std::size_t n = d.size();
    const std::size_t m = lattice.neuron_count();
    if (n == 0) throw InvalidInput("median map training: empty dissimilarity matrix");

    QMedianMapState state;
    state.warnings = std::move(warnings);
    state.prototype_sets.assign(m, {});
    if (initial_prototypes != nullptr) {
        if (initial_prototypes->size() != q * m)
            throw InvalidInput("median map training: expected " + std::to_string(q * m) +
                               " initial prototype indices, got " +
                               std::to_string(initial_prototypes->size()));
        for (std::size_t idx : *initial_prototypes)
            if (idx >= n)
                throw InvalidInput("median map training: initial prototype index " +
                                   std::to_string(idx) + " out of range");
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t r = 0; r < q; ++r)
                state.prototype_sets[c].push_back((*initial_prototypes)[c * q + r]);
    } else {
        const std::vector<std::size_t> init = initial_prototype_rows(n, q * m, seed);
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t r = 0; r < q; ++r) state.prototype_sets[c].push_back(init[c * q + r]);
    }

    state.assignments.assign(n, 0);
    // Whether an early fixed-point stop keeps later sweeps identical: only
    // when the radius (hence the weight table) no longer changes.
    const bool constant_radius =
        schedule.sweep_count == 1 || schedule.initial_radius == schedule.final_radius;
    std::vector<double> candidate_cost(n);

    for (std::size_t sweep = 0; sweep < schedule.sweep_count; ++sweep) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = set_dissimilarity(d, i, state.prototype_sets[0]);
            for (std::size_t c = 1; c < m; ++c) {
                const double dist = set_dissimilarity(d, i, state.prototype_sets[c]);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (state.assignments[i] != best) changed = true;
            state.assignments[i] = best;
        }

        state.assignment_history.push_back(state.assignments);

        const Matrix gamma = neighbor_weight_table(schedule, lattice, sweep);
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t p = 0; p < n; ++p)
                candidate_cost[p] = local_distortion(d, state.assignments, gamma, c, p);
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return candidate_cost[a] < candidate_cost[b];
            });
            std::vector<std::size_t> chosen(order.begin(), order.begin() + q);
            std::sort(chosen.begin(), chosen.end());
            if (chosen != state.prototype_sets[c]) changed = true;
            state.prototype_sets[c] = std::move(chosen);
        }
        state.prototype_set_history.push_back(state.prototype_sets);

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < m; ++c) {
                const double w = gamma(state.assignments[i], c);
                if (w > 0.0) total += w * set_dissimilarity(d, i, state.prototype_sets[c]);
            }
        state.distortion_trace.push_back(total);
        state.sweeps_run = sweep + 1;

        if (stop_on_fixed_point && constant_radius && !changed) break;
    }
    return state;
}

} // namespace

MedianMapState median_som_train(const DissimilarityMatrix& d, const MapLattice& lattice,
                                const NeighborhoodSchedule& schedule, std::uint64_t seed,
                                bool stop_on_fixed_point,
                                const std::vector<std::size_t>* initial_prototypes) {
    std::vector<std::string> warnings;
    if (d.size() < lattice.neuron_count())
        warnings.push_back("fewer observations (" + std::to_string(d.size()) + ") than neurons (" +
                           std::to_string(lattice.neuron_count()) +
                           "); some prototypes start on repeated observations");
    QMedianMapState q1 = q_median_engine(d, lattice, schedule, 1, seed, stop_on_fixed_point,
                                         std::move(warnings), initial_prototypes);
    MedianMapState state;
    state.prototype_indices.reserve(q1.prototype_sets.size());
    for (const auto& set : q1.prototype_sets) state.prototype_indices.push_back(set.front());
    state.assignments = std::move(q1.assignments);
    state.distortion_trace = std::move(q1.distortion_trace);
    state.sweeps_run = q1.sweeps_run;
    state.warnings = std::move(q1.warnings);
    state.assignment_history = std::move(q1.assignment_history);
    state.prototype_history.reserve(q1.prototype_set_history.size());
    for (const auto& sets : q1.prototype_set_history) {
        std::vector<std::size_t> flat;
        flat.reserve(sets.size());
        for (const auto& set : sets) flat.push_back(set.front());
        state.prototype_history.push_back(std::move(flat));
    }
    return state;
}

QMedianMapState q_median_som_train(const DissimilarityMatrix& d, const MapLattice& lattice,
                                   const NeighborhoodSchedule& schedule, std::size_t q,
                                   std::uint64_t seed, bool stop_on_fixed_point,
                                   const std::vector<std::size_t>* initial_prototypes) {
    if (q == 0) throw InvalidInput("q_median_som_train: q must be >= 1");
    if (q * lattice.neuron_count() > d.size())
        throw InvalidInput("q_median_som_train: q * neuron count (" +
                           std::to_string(q * lattice.neuron_count()) +
                           ") exceeds observation count (" + std::to_string(d.size()) + ")");
    return q_median_engine(d, lattice, schedule, q, seed, stop_on_fixed_point, {},
                           initial_prototypes);
}

double kernel_prototype_distance2(const KernelMatrix& k, std::span<const double> gamma_row,
                                  std::size_t j) {
    const std::size_t n = k.size();
    if (gamma_row.size() != n)
        throw InvalidInput("kernel_prototype_distance2: coefficient length does not match kernel");
    if (j >= n) throw InvalidInput("kernel_prototype_distance2: observation index out of range");
    double cross = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gamma_row[i] == 0.0) continue;
        cross += gamma_row[i] * k(j, i);
        double inner = 0.0;
        for (std::size_t i2 = 0; i2 < n; ++i2)
            if (gamma_row[i2] != 0.0) inner += gamma_row[i2] * k(i, i2);
        quad += gamma_row[i] * inner;
    }
    return k(j, j) - 2.0 * cross + quad;
}

KernelMapState kernel_som_train(const KernelMatrix& k, const MapLattice& lattice,
                                const NeighborhoodSchedule& schedule, std::uint64_t seed) {
    schedule.validate();
    const std::size_t n = k.size();
    const std::size_t m = lattice.neuron_count();
    if (n == 0) throw InvalidInput("kernel_som_train: empty kernel matrix");

    KernelMapState state;
    state.gamma = Matrix(m, n);
    const std::vector<std::size_t> init = initial_prototype_rows(n, m, seed);
    for (std::size_t c = 0; c < m; ++c) state.gamma(c, init[c]) = 1.0;

    std::vector<std::size_t> assignments(n, 0);
    Matrix cross(m, n);           // (gamma K)(c, j) = sum_i gamma_ci K_ij
    std::vector<double> quad(m);  // gamma_c K gamma_c^T, independent of j
    std::vector<double> denom(m);

    const auto refresh_distances = [&]() {
        for (std::size_t c = 0; c < m; ++c) {
            auto g = state.gamma.row(c);
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (g[i] != 0.0) s += g[i] * k(i, j);
                cross(c, j) = s;
            }
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (g[i] != 0.0) s += g[i] * cross(c, i);
            quad[c] = s;
        }
    };
    const auto distance2 = [&](std::size_t j, std::size_t c) {
        return k(j, j) - 2.0 * cross(c, j) + quad[c];
    };

    for (std::size_t sweep = 0; sweep < schedule.sweep_count; ++sweep) {
        refresh_distances();
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t best = 0;
            double best_d = distance2(j, 0);
            for (std::size_t c = 1; c < m; ++c) {
                const double d2 = distance2(j, c);
                if (d2 < best_d) {
                    best_d = d2;
                    best = c;
                }
            }
            assignments[j] = best;
        }
        state.assignment_history.push_back(assignments);

        const Matrix gamma_table = neighbor_weight_table(schedule, lattice, sweep);
        std::fill(denom.begin(), denom.end(), 0.0);
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t i = 0; i < n; ++i) denom[c] += gamma_table(assignments[i], c);
        for (std::size_t c = 0; c < m; ++c) {
            if (denom[c] <= 0.0) continue; // empty neuron keeps its coefficients
            auto g = state.gamma.row(c);
            for (std::size_t i = 0; i < n; ++i) g[i] = gamma_table(assignments[i], c) / denom[c];
        }

        refresh_distances();
        double energy = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t c = 0; c < m; ++c) {
                const double w = gamma_table(assignments[j], c);
                if (w > 0.0) energy += w * distance2(j, c);
            }
        state.energy_trace.push_back(energy);
    }

    refresh_distances();
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t best = 0;
        double best_d = distance2(j, 0);
        for (std::size_t c = 1; c < m; ++c) {
            const double d2 = distance2(j, c);
            if (d2 < best_d) {
                best_d = d2;
                best = c;
            }
        }
        assignments[j] = best;
    }
    state.assignments = std::move(assignments);
    return state;
}

} // namespace ncd
