#ifndef NCD_SVG_HPP
#define NCD_SVG_HPP

#include <span>
#include <string>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/som.hpp"

namespace ncd {

/// Per-neuron mean Euclidean distance to the prototypes of lattice neighbors
/// (neurons at lattice distance exactly 1). A lone neuron has value 0.
std::vector<double> u_matrix_values(const Matrix& prototypes, const MapLattice& lattice);

/// Per-neuron assignment counts as doubles, for count shading.
std::vector<double> neuron_count_values(const std::vector<std::size_t>& assignments,
                                        std::size_t neuron_count);

/// Standalone SVG: one square cell per neuron in the lattice arrangement,
/// grayscale-shaded by value (dark = high). Values are min-max normalized;
/// a flat value vector shades every cell mid-scale. Output is deterministic:
/// identical inputs give identical bytes.
std::string render_lattice_svg(const MapLattice& lattice, std::span<const double> values,
                               const std::string& title);

} // namespace ncd

#endif
