#ifndef NCD_SOM_HPP
#define NCD_SOM_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ncd/common.hpp"

namespace ncd {

enum class LatticeShape { Grid, String };
enum class LatticeMetric { Euclidean, Manhattan };

/// Prior structure of a map: neurons at integer coordinates on a 2-d grid
/// (row-major, index = row * cols + col) or a 1-d string.
class MapLattice {
public:
    static MapLattice grid(std::size_t rows, std::size_t cols,
                           LatticeMetric metric = LatticeMetric::Euclidean);
    static MapLattice string(std::size_t length,
                             LatticeMetric metric = LatticeMetric::Euclidean);

    LatticeShape shape() const { return shape_; }
    LatticeMetric metric() const { return metric_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t neuron_count() const { return coords_.size(); }
    std::pair<int, int> coordinates(std::size_t neuron) const;

    /// Distance between neuron coordinates under the lattice metric.
    double distance(std::size_t c, std::size_t d) const;

    /// Lattice neighbors are neuron pairs at distance exactly 1.
    bool are_neighbors(std::size_t c, std::size_t d) const;

private:
    LatticeShape shape_ = LatticeShape::String;
    LatticeMetric metric_ = LatticeMetric::Euclidean;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::pair<int, int>> coords_;
};

enum class NeighborhoodKind { Gaussian, Window };

/// Neighborhood function over sweeps. The radius interpolates linearly from
/// initial_radius (sweep 0) to final_radius (last sweep); a single-sweep
/// schedule runs at the final radius.
struct NeighborhoodSchedule {
    NeighborhoodKind kind = NeighborhoodKind::Gaussian;
    double initial_radius = 3.0;
    double final_radius = 0.5;
    std::size_t sweep_count = 30;

    void validate() const;
    double radius_at(std::size_t sweep) const;
};

/// Gamma(c, d) at the given sweep: gaussian exp(-dist^2 / (2 r^2)) or the
/// hard window [dist <= r]. Always in [0, 1], and 1 when c == d.
double neighborhood_weight(const NeighborhoodSchedule& schedule, const MapLattice& lattice,
                           std::size_t c, std::size_t d, std::size_t sweep);

/// M x M table of neighborhood weights at one sweep.
Matrix neighbor_weight_table(const NeighborhoodSchedule& schedule, const MapLattice& lattice,
                             std::size_t sweep);

/// Index of the prototype (row of the matrix) closest to x in Euclidean
/// distance; ties break toward the lowest index.
std::size_t assign(std::span<const double> x, const Matrix& prototypes);

/// Seeded choice of m observation indices used to initialize prototypes:
/// distinct rows when n >= m, wrapping over a seeded permutation otherwise.
/// Shared by every map trainer so the variants start from the same points.
std::vector<std::size_t> initial_prototype_rows(std::size_t n, std::size_t m, std::uint64_t seed);

struct BatchSomResult {
    Matrix prototypes;                    // M x dim
    std::vector<std::size_t> assignments; // per observation, wrt final prototypes
    std::vector<double> energy_trace;     // per sweep
    std::vector<std::vector<std::size_t>> assignment_history; // per sweep
};

/// Batch SOM: alternate nearest-prototype assignment and the update
///   p_c <- sum_i Gamma(N(x_i), c) x_i / sum_i Gamma(N(x_i), c)
/// for sweep_count sweeps. Prototypes are initialized on seeded distinct data
/// points unless explicit initial prototypes are supplied; neurons with an
/// empty denominator keep their previous prototype.
BatchSomResult batch_som_train(const Matrix& data, const MapLattice& lattice,
                               const NeighborhoodSchedule& schedule, std::uint64_t seed,
                               const Matrix* initial_prototypes = nullptr);

struct MapQuality {
    double quantization_error = 0.0; // mean distance to the assigned prototype
    double topographic_error = 0.0;  // share of points whose two best neurons are not neighbors
};

MapQuality map_quality(const Matrix& data, const Matrix& prototypes, const MapLattice& lattice);

/// Sampled derivative: central differences in the interior, one-sided at the
/// ends. Grid must be strictly increasing with at least two points.
std::vector<double> derivative_preprocess(std::span<const double> samples,
                                          std::span<const double> grid);

struct SegmentedPrototype {
    std::vector<double> values;            // piecewise-constant samples, length H
    std::vector<std::size_t> breakpoints;  // start index of each segment; first is 0
    double squared_error = 0.0;
};

/// Optimal piecewise-constant approximation with segment_count segments,
/// minimizing squared error by dynamic programming; each segment takes its
/// mean value.
SegmentedPrototype segment_project_prototype(std::span<const double> samples,
                                             std::size_t segment_count);

} // namespace ncd

#endif
