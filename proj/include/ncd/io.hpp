#ifndef NCD_IO_HPP
#define NCD_IO_HPP

#include <string>
#include <vector>

#include "ncd/categorical.hpp"
#include "ncd/common.hpp"
#include "ncd/forecast.hpp"

namespace ncd {

/// Numeric CSV: comma-separated doubles, one row per line. Blank lines and
/// lines starting with '#' are skipped. Errors carry the 1-based line number.
Matrix read_csv_matrix(const std::string& path);

/// Writes doubles in shortest round-trip form so a rewrite is bit-exact.
void write_csv_matrix(const std::string& path, const Matrix& values);

/// Single-column numeric CSV (one value per line).
std::vector<double> read_series_csv(const std::string& path);

/// Two-scale CSV: one line per slow step, H numeric columns followed by one
/// metadata label column.
TwoScaleSeries read_two_scale_csv(const std::string& path);

/// Categorical CSV: header line naming the variables, then one label row per
/// individual. Dictionaries are inferred from the data.
CategoricalTable read_categorical_csv(const std::string& path);

/// Whitespace-separated "u v" edges, one per line ('#' comments allowed),
/// 0-based vertices; returns the symmetric 0/1 adjacency matrix over
/// max-index + 1 vertices. Self-loops are rejected.
Matrix read_edge_list(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest-round-trip decimal formatting used across CSV/JSON/SVG output.
std::string format_double(double value);

} // namespace ncd

#endif
