#ifndef NCD_CATEGORICAL_HPP
#define NCD_CATEGORICAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ncd/common.hpp"
#include "ncd/som.hpp"

namespace ncd {

struct CategoricalVariable {
    std::string name;
    std::vector<std::string> categories; // dictionary, nonempty, no duplicates
};

/// n individuals by V variables of category labels, with a dictionary per
/// variable. Every cell is guaranteed to belong to its dictionary.
class CategoricalTable {
public:
    /// Dictionaries are inferred from the data, categories ordered by first
    /// appearance down each column.
    static CategoricalTable inferred(std::vector<std::string> variable_names,
                                     std::vector<std::vector<std::string>> rows);

    /// Explicit dictionaries; a cell outside its dictionary is rejected with
    /// its location.
    static CategoricalTable with_dictionaries(std::vector<CategoricalVariable> variables,
                                              std::vector<std::vector<std::string>> rows);

    std::size_t individual_count() const { return rows_.size(); }
    std::size_t variable_count() const { return variables_.size(); }
    const std::vector<CategoricalVariable>& variables() const { return variables_; }
    const std::string& value(std::size_t individual, std::size_t variable) const;

    /// Position of the label inside variable v's dictionary; throws
    /// InvalidInput naming the label and variable when absent.
    std::size_t category_index(std::size_t variable, const std::string& label) const;

    /// Total category count C across all dictionaries.
    std::size_t total_category_count() const;

private:
    std::vector<CategoricalVariable> variables_;
    std::vector<std::vector<std::string>> rows_;
};

enum class EncodingKind { Cdt, Burt };

struct ColumnCategory {
    std::size_t variable = 0; // index into the table's variables
    std::size_t category = 0; // index into that variable's dictionary
    std::string label;        // "<variable>=<category>"
};

/// Complete disjunctive table (n x C one-hot rows) or Burt table (C x C
/// category co-occurrence counts).
struct EncodedTable {
    EncodingKind kind = EncodingKind::Cdt;
    Matrix values;
    std::vector<ColumnCategory> columns; // length C; Burt rows share them
};

/// One-hot coding: row per individual, one 1 per variable block.
EncodedTable disjunctive_table(const CategoricalTable& table);

/// Burt table: full category contingency, equal to CDT^T * CDT.
EncodedTable burt_table(const CategoricalTable& table);

struct CaTransformResult {
    Matrix values;                          // rows transformed, zero columns dropped
    std::vector<std::size_t> kept_columns;  // original column indices, in order
    std::vector<std::string> warnings;      // one per dropped column
};

/// Correspondence-analysis row scaling z_ij = t_ij / (r_i * sqrt(c_j / T)),
/// with r row sums, c column sums, T the grand total. Euclidean distance
/// between transformed rows equals the chi-square distance between the
/// original row profiles. All-zero columns are dropped with a warning;
/// an all-zero row is rejected.
CaTransformResult ca_transform(const EncodedTable& encoded);

struct CategoricalMapResult {
    BatchSomResult map;
    Matrix transformed;                  // the rows that were clustered
    std::vector<std::string> row_labels; // individual index or category label
    std::vector<std::string> warnings;
};

/// Pipeline: encode (cdt clusters individuals, burt clusters categories) ->
/// ca_transform -> batch_som_train on the transformed rows.
CategoricalMapResult categorical_som_train(const CategoricalTable& table, EncodingKind kind,
                                           const MapLattice& lattice,
                                           const NeighborhoodSchedule& schedule,
                                           std::uint64_t seed);

} // namespace ncd

#endif
