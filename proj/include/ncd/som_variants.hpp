#ifndef NCD_SOM_VARIANTS_HPP
#define NCD_SOM_VARIANTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ncd/metric.hpp"
#include "ncd/som.hpp"

namespace ncd {

/// Local distortion of a candidate prototype p for neuron c:
///   sum_i Gamma(N(x_i), c) * d(x_i, p)
/// with Gamma supplied as an M x M neighbor weight table.
double local_distortion(const DissimilarityMatrix& d, const std::vector<std::size_t>& assignments,
                        const Matrix& neighbor_weights, std::size_t neuron,
                        std::size_t candidate);

struct MedianMapState {
    std::vector<std::size_t> prototype_indices; // observation index per neuron
    std::vector<std::size_t> assignments;       // neuron index per observation
    std::vector<double> distortion_trace;       // total distortion after each sweep
    std::size_t sweeps_run = 0;
    std::vector<std::string> warnings;
    // Per-sweep record of the assignments used by each update and the
    // prototypes it produced, so updates can be audited after the fact.
    std::vector<std::vector<std::size_t>> assignment_history;
    std::vector<std::vector<std::size_t>> prototype_history;
};

struct QMedianMapState {
    std::vector<std::vector<std::size_t>> prototype_sets; // q distinct observations per neuron
    std::vector<std::size_t> assignments;
    std::vector<double> distortion_trace;
    std::size_t sweeps_run = 0;
    std::vector<std::string> warnings;
    std::vector<std::vector<std::size_t>> assignment_history;
    std::vector<std::vector<std::vector<std::size_t>>> prototype_set_history;
};

/// Median SOM: prototypes constrained to observations. Each sweep assigns
/// every observation to the neuron with the least dissimilar prototype
/// (ties toward the lowest neuron), then moves each prototype to the
/// observation minimizing the local distortion (ties toward the lowest
/// observation index). Stops on a fixed point or after the sweep budget.
/// Initial prototypes are seeded distinct observations unless given.
MedianMapState median_som_train(const DissimilarityMatrix& d, const MapLattice& lattice,
                                const NeighborhoodSchedule& schedule, std::uint64_t seed,
                                bool stop_on_fixed_point = true,
                                const std::vector<std::size_t>* initial_prototypes = nullptr);

/// Median SOM with q prototypes per neuron. Observation-to-neuron
/// dissimilarity is the mean of d(x_i, p) over the neuron's prototypes; the
/// update greedily adds the observation with the least incremental local
/// distortion q times. Requires q * M <= n.
QMedianMapState q_median_som_train(const DissimilarityMatrix& d, const MapLattice& lattice,
                                   const NeighborhoodSchedule& schedule, std::size_t q,
                                   std::uint64_t seed, bool stop_on_fixed_point = true,
                                   const std::vector<std::size_t>* initial_prototypes = nullptr);

struct KernelMapState {
    Matrix gamma;                         // M x n coefficient rows, each a simplex vector
    std::vector<std::size_t> assignments; // wrt final coefficients
    std::vector<double> energy_trace;
    std::vector<std::vector<std::size_t>> assignment_history; // per sweep
};

/// Batch SOM in the kernel feature space. Prototypes are implicit
/// combinations p_c = sum_i gamma[c][i] phi(x_i); assignment uses
///   |phi(x_j) - p_c|^2 = K_jj - 2 sum_i gamma_ci K_ji
///                        + sum_{i,i'} gamma_ci gamma_ci' K_ii'
/// and the update renormalizes neighborhood weights into the rows.
KernelMapState kernel_som_train(const KernelMatrix& k, const MapLattice& lattice,
                                const NeighborhoodSchedule& schedule, std::uint64_t seed);

/// Squared feature-space distance between observation j and the implicit
/// prototype held in coefficient row gamma_c.
double kernel_prototype_distance2(const KernelMatrix& k, std::span<const double> gamma_row,
                                  std::size_t j);

} // namespace ncd

#endif
