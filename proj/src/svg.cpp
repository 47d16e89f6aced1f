#include "ncd/svg.hpp"

#include <algorithm>
#include <cmath>

#include "ncd/io.hpp"

namespace ncd {

std::vector<double> u_matrix_values(const Matrix& prototypes, const MapLattice& lattice) {
    const std::size_t m = lattice.neuron_count();
    if (prototypes.rows() != m)
        throw InvalidInput("u_matrix_values: prototype count does not match the lattice");
    std::vector<double> values(m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        double total = 0.0;
        std::size_t neighbor_count = 0;
        for (std::size_t d = 0; d < m; ++d) {
            if (d == c || !lattice.are_neighbors(c, d)) continue;
            total += std::sqrt(squared_distance(prototypes.row(c), prototypes.row(d)));
            ++neighbor_count;
        }
        values[c] = neighbor_count > 0 ? total / static_cast<double>(neighbor_count) : 0.0;
    }
    return values;
}

std::vector<double> neuron_count_values(const std::vector<std::size_t>& assignments,
                                        std::size_t neuron_count) {
    std::vector<double> counts(neuron_count, 0.0);
    for (std::size_t a : assignments) {
        if (a >= neuron_count) throw InvalidInput("neuron_count_values: assignment out of range");
        counts[a] += 1.0;
    }
    return counts;
}

std::string render_lattice_svg(const MapLattice& lattice, std::span<const double> values,
                               const std::string& title) {
    const std::size_t m = lattice.neuron_count();
    if (values.size() != m)
        throw InvalidInput("render_lattice_svg: need one value per neuron");

    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    constexpr int kCell = 40;
    constexpr int kGap = 4;
    constexpr int kMargin = 16;
    constexpr int kHeader = 24;
    const int width = kMargin * 2 + static_cast<int>(lattice.cols()) * (kCell + kGap) - kGap;
    const int height =
        kMargin * 2 + kHeader + static_cast<int>(lattice.rows()) * (kCell + kGap) - kGap;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin) +
           "\" font-family=\"monospace\" font-size=\"13\">" + title + "</text>\n";

    for (std::size_t c = 0; c < m; ++c) {
        const auto [row, col] = lattice.coordinates(c);
        // Mid-scale shade when every value is identical (e.g. one neuron).
        const double norm = hi > lo ? (values[c] - lo) / (hi - lo) : 0.5;
        const int shade = 235 - static_cast<int>(std::lround(norm * 195.0));
        const int x = kMargin + col * (kCell + kGap);
        const int y = kMargin + kHeader + row * (kCell + kGap);
        svg += "  <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
               std::to_string(kCell) + "\" height=\"" + std::to_string(kCell) + "\" fill=\"rgb(" +
               std::to_string(shade) + "," + std::to_string(shade) + "," + std::to_string(shade) +
               ")\" stroke=\"#444\"><title>neuron " + std::to_string(c) + ": " +
               format_double(values[c]) + "</title></rect>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace ncd
