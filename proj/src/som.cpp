#include "ncd/som.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ncd {

MapLattice MapLattice::grid(std::size_t rows, std::size_t cols, LatticeMetric metric) {
    if (rows == 0 || cols == 0) throw InvalidInput("MapLattice::grid: rows and cols must be >= 1");
    MapLattice lattice;
    lattice.shape_ = LatticeShape::Grid;
    lattice.metric_ = metric;
    lattice.rows_ = rows;
    lattice.cols_ = cols;
    lattice.coords_.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            lattice.coords_.emplace_back(static_cast<int>(r), static_cast<int>(c));
    return lattice;
}

MapLattice MapLattice::string(std::size_t length, LatticeMetric metric) {
    if (length == 0) throw InvalidInput("MapLattice::string: length must be >= 1");
    MapLattice lattice;
    lattice.shape_ = LatticeShape::String;
    lattice.metric_ = metric;
    lattice.rows_ = 1;
    lattice.cols_ = length;
    lattice.coords_.reserve(length);
    for (std::size_t i = 0; i < length; ++i) lattice.coords_.emplace_back(0, static_cast<int>(i));
    return lattice;
}

std::pair<int, int> MapLattice::coordinates(std::size_t neuron) const {
    if (neuron >= coords_.size())
        throw InvalidInput("MapLattice: neuron index " + std::to_string(neuron) +
                           " out of range (count " + std::to_string(coords_.size()) + ")");
    return coords_[neuron];
}

double MapLattice::distance(std::size_t c, std::size_t d) const {
    const auto [r1, c1] = coordinates(c);
    const auto [r2, c2] = coordinates(d);
    const double dr = static_cast<double>(r1 - r2);
    const double dc = static_cast<double>(c1 - c2);
    if (metric_ == LatticeMetric::Manhattan) return std::abs(dr) + std::abs(dc);
    return std::sqrt(dr * dr + dc * dc);
}

bool MapLattice::are_neighbors(std::size_t c, std::size_t d) const {
    return std::abs(distance(c, d) - 1.0) < 1e-12;
}

void NeighborhoodSchedule::validate() const {
    if (sweep_count == 0) throw InvalidInput("NeighborhoodSchedule: sweep_count must be >= 1");
    if (!(final_radius > 0.0)) throw InvalidInput("NeighborhoodSchedule: final radius must be positive");
    if (initial_radius < final_radius)
        throw InvalidInput("NeighborhoodSchedule: initial radius must be >= final radius");
}

double NeighborhoodSchedule::radius_at(std::size_t sweep) const {
    validate();
    if (sweep >= sweep_count)
        throw InvalidInput("NeighborhoodSchedule: sweep index " + std::to_string(sweep) +
                           " out of range (sweep_count " + std::to_string(sweep_count) + ")");
    if (sweep_count == 1) return final_radius;
    const double fraction = static_cast<double>(sweep) / static_cast<double>(sweep_count - 1);
    return initial_radius + (final_radius - initial_radius) * fraction;
}

double neighborhood_weight(const NeighborhoodSchedule& schedule, const MapLattice& lattice,
                           std::size_t c, std::size_t d, std::size_t sweep) {
    const double r = schedule.radius_at(sweep);
    const double dist = lattice.distance(c, d);
    if (schedule.kind == NeighborhoodKind::Window) return dist <= r ? 1.0 : 0.0;
    return std::exp(-dist * dist / (2.0 * r * r));
}

Matrix neighbor_weight_table(const NeighborhoodSchedule& schedule, const MapLattice& lattice,
                             std::size_t sweep) {
    const std::size_t m = lattice.neuron_count();
    Matrix table(m, m);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t d = 0; d < m; ++d)
            table(c, d) = neighborhood_weight(schedule, lattice, c, d, sweep);
    return table;
}

std::size_t assign(std::span<const double> x, const Matrix& prototypes) {
    if (prototypes.rows() == 0) throw InvalidInput("assign: empty prototype set");
    std::size_t best = 0;
    double best_dist = squared_distance(x, prototypes.row(0));
    for (std::size_t c = 1; c < prototypes.rows(); ++c) {
        const double d = squared_distance(x, prototypes.row(c));
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

std::vector<std::size_t> initial_prototype_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("initial_prototype_rows: no observations");
    Rng rng(derive_seed(seed, 0x50524f54ULL));
    if (n >= m) return rng.sample_indices(n, m);
    std::vector<std::size_t> perm = rng.sample_indices(n, n);
    std::vector<std::size_t> rows(m);
    for (std::size_t c = 0; c < m; ++c) rows[c] = perm[c % n];
    return rows;
}

BatchSomResult batch_som_train(const Matrix& data, const MapLattice& lattice,
                               const NeighborhoodSchedule& schedule, std::uint64_t seed,
                               const Matrix* initial_prototypes) {
    schedule.validate();
    if (data.rows() == 0) throw InvalidInput("batch_som_train: empty data");
    const std::size_t n = data.rows();
    const std::size_t dim = data.cols();
    const std::size_t m = lattice.neuron_count();

    BatchSomResult result;
    if (initial_prototypes != nullptr) {
        if (initial_prototypes->rows() != m || initial_prototypes->cols() != dim)
            throw InvalidInput("batch_som_train: initial prototypes must be neuron_count x data dimension");
        result.prototypes = *initial_prototypes;
    } else {
        result.prototypes = Matrix(m, dim);
        const std::vector<std::size_t> init_rows = initial_prototype_rows(n, m, seed);
        for (std::size_t c = 0; c < m; ++c)
            std::copy(data.row(init_rows[c]).begin(), data.row(init_rows[c]).end(),
                      result.prototypes.row(c).begin());
    }

    std::vector<std::size_t> assignments(n, 0);
    Matrix numerators(m, dim);
    std::vector<double> denominators(m);

    for (std::size_t sweep = 0; sweep < schedule.sweep_count; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) assignments[i] = assign(data.row(i), result.prototypes);
        result.assignment_history.push_back(assignments);

        const Matrix gamma = neighbor_weight_table(schedule, lattice, sweep);
        std::fill(numerators.data().begin(), numerators.data().end(), 0.0);
        std::fill(denominators.begin(), denominators.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.row(i);
            for (std::size_t c = 0; c < m; ++c) {
                const double w = gamma(assignments[i], c);
                if (w == 0.0) continue;
                auto num = numerators.row(c);
                for (std::size_t j = 0; j < dim; ++j) num[j] += w * x[j];
                denominators[c] += w;
            }
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (denominators[c] <= 0.0) continue; // empty neuron keeps its prototype
            auto p = result.prototypes.row(c);
            for (std::size_t j = 0; j < dim; ++j) p[j] = numerators(c, j) / denominators[c];
        }

        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < m; ++c) {
                const double w = gamma(assignments[i], c);
                if (w > 0.0) energy += w * squared_distance(data.row(i), result.prototypes.row(c));
            }
        result.energy_trace.push_back(energy);
    }

    for (std::size_t i = 0; i < n; ++i) assignments[i] = assign(data.row(i), result.prototypes);
    result.assignments = std::move(assignments);
    return result;
}

MapQuality map_quality(const Matrix& data, const Matrix& prototypes, const MapLattice& lattice) {
    if (data.rows() == 0) throw InvalidInput("map_quality: empty data");
    if (prototypes.rows() != lattice.neuron_count())
        throw InvalidInput("map_quality: prototype count does not match the lattice");
    MapQuality q;
    const std::size_t m = prototypes.rows();
    std::size_t breaks = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto x = data.row(i);
        std::size_t best = 0, second = 0;
        double best_d = std::numeric_limits<double>::infinity();
        double second_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < m; ++c) {
            const double d = squared_distance(x, prototypes.row(c));
            if (d < best_d) {
                second_d = best_d;
                second = best;
                best_d = d;
                best = c;
            } else if (d < second_d) {
                second_d = d;
                second = c;
            }
        }
        q.quantization_error += std::sqrt(best_d);
        if (m > 1 && !lattice.are_neighbors(best, second)) ++breaks;
    }
    q.quantization_error /= static_cast<double>(data.rows());
    q.topographic_error = m > 1 ? static_cast<double>(breaks) / static_cast<double>(data.rows()) : 0.0;
    return q;
}

std::vector<double> derivative_preprocess(std::span<const double> samples,
                                          std::span<const double> grid) {
    if (grid.size() < 2) throw InvalidInput("derivative_preprocess: need at least two grid points");
    if (samples.size() != grid.size())
        throw InvalidInput("derivative_preprocess: samples and grid lengths differ");
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (grid[g] <= grid[g - 1])
            throw InvalidInput("derivative_preprocess: grid must be strictly increasing");

    const std::size_t h = grid.size();
    std::vector<double> d(h);
    d[0] = (samples[1] - samples[0]) / (grid[1] - grid[0]);
    for (std::size_t g = 1; g + 1 < h; ++g)
        d[g] = (samples[g + 1] - samples[g - 1]) / (grid[g + 1] - grid[g - 1]);
    d[h - 1] = (samples[h - 1] - samples[h - 2]) / (grid[h - 1] - grid[h - 2]);
    return d;
}

SegmentedPrototype segment_project_prototype(std::span<const double> samples,
                                             std::size_t segment_count) {
    const std::size_t h = samples.size();
    if (segment_count < 1) throw InvalidInput("segment_project_prototype: need at least one segment");
    if (segment_count > h)
        throw InvalidInput("segment_project_prototype: segment count " +
                           std::to_string(segment_count) + " exceeds sample count " +
                           std::to_string(h));

    // Prefix sums give O(1) segment cost: SSE of samples[a..b] around its mean.
    std::vector<double> sum(h + 1, 0.0), sumsq(h + 1, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
        sum[i + 1] = sum[i] + samples[i];
        sumsq[i + 1] = sumsq[i] + samples[i] * samples[i];
    }
    const auto cost = [&](std::size_t a, std::size_t b) { // inclusive bounds
        if (a == b) return 0.0; // a single sample always matches its mean
        const double s = sum[b + 1] - sum[a];
        const double s2 = sumsq[b + 1] - sumsq[a];
        const double len = static_cast<double>(b - a + 1);
        return std::max(0.0, s2 - s * s / len);
    };

    const double inf = std::numeric_limits<double>::infinity();
    Matrix best(segment_count + 1, h + 1, inf);   // best(s, j): first j samples in s segments
    Matrix split(segment_count + 1, h + 1, 0.0);  // start of the last segment
    best(0, 0) = 0.0;
    for (std::size_t s = 1; s <= segment_count; ++s) {
        for (std::size_t j = s; j <= h; ++j) {
            for (std::size_t a = s - 1; a < j; ++a) { // last segment covers [a, j-1]
                if (best(s - 1, a) == inf) continue;
                const double e = best(s - 1, a) + cost(a, j - 1);
                if (e < best(s, j)) {
                    best(s, j) = e;
                    split(s, j) = static_cast<double>(a);
                }
            }
        }
    }

    SegmentedPrototype out;
    out.breakpoints.resize(segment_count);
    std::size_t j = h;
    for (std::size_t s = segment_count; s >= 1; --s) {
        const std::size_t a = static_cast<std::size_t>(split(s, j));
        out.breakpoints[s - 1] = a;
        j = a;
    }
    // Report means and error recomputed directly over the chosen segments;
    // the prefix-sum shortcut only steers the search.
    out.values.resize(h);
    out.squared_error = 0.0;
    for (std::size_t s = 0; s < segment_count; ++s) {
        const std::size_t a = out.breakpoints[s];
        const std::size_t b = (s + 1 < segment_count) ? out.breakpoints[s + 1] : h;
        double mean = 0.0;
        for (std::size_t i = a; i < b; ++i) mean += samples[i];
        mean /= static_cast<double>(b - a);
        for (std::size_t i = a; i < b; ++i) {
            out.values[i] = mean;
            out.squared_error += (samples[i] - mean) * (samples[i] - mean);
        }
    }
    return out;
}

} // namespace ncd
