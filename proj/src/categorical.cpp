#include "ncd/categorical.hpp"

#include <algorithm>
#include <cmath>

namespace ncd {

namespace {

void check_rows(const std::vector<CategoricalVariable>& variables,
                const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != variables.size())
            throw InvalidInput("categorical table: row " + std::to_string(i) + " has " +
                               std::to_string(rows[i].size()) + " cells, expected " +
                               std::to_string(variables.size()));
}

} // namespace

CategoricalTable CategoricalTable::inferred(std::vector<std::string> variable_names,
                                            std::vector<std::vector<std::string>> rows) {
    if (variable_names.empty()) throw InvalidInput("categorical table: no variables");
    std::vector<CategoricalVariable> variables;
    variables.reserve(variable_names.size());
    for (auto& name : variable_names) variables.push_back({std::move(name), {}});
    check_rows(variables, rows);
    if (rows.empty()) throw InvalidInput("categorical table: no individuals");
    for (const auto& row : rows)
        for (std::size_t v = 0; v < variables.size(); ++v) {
            auto& dict = variables[v].categories;
            if (std::find(dict.begin(), dict.end(), row[v]) == dict.end())
                dict.push_back(row[v]);
        }
    CategoricalTable table;
    table.variables_ = std::move(variables);
    table.rows_ = std::move(rows);
    return table;
}

CategoricalTable CategoricalTable::with_dictionaries(std::vector<CategoricalVariable> variables,
                                                     std::vector<std::vector<std::string>> rows) {
    if (variables.empty()) throw InvalidInput("categorical table: no variables");
    for (const auto& variable : variables) {
        if (variable.categories.empty())
            throw InvalidInput("categorical table: variable '" + variable.name +
                               "' has an empty dictionary");
        for (std::size_t a = 0; a < variable.categories.size(); ++a)
            for (std::size_t b = a + 1; b < variable.categories.size(); ++b)
                if (variable.categories[a] == variable.categories[b])
                    throw InvalidInput("categorical table: variable '" + variable.name +
                                       "' lists category '" + variable.categories[a] + "' twice");
    }
    check_rows(variables, rows);
    if (rows.empty()) throw InvalidInput("categorical table: no individuals");
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t v = 0; v < variables.size(); ++v) {
            const auto& dict = variables[v].categories;
            if (std::find(dict.begin(), dict.end(), rows[i][v]) == dict.end())
                throw InvalidInput("categorical table: unknown label '" + rows[i][v] +
                                   "' at individual " + std::to_string(i) + ", variable '" +
                                   variables[v].name + "'");
        }
    CategoricalTable table;
    table.variables_ = std::move(variables);
    table.rows_ = std::move(rows);
    return table;
}

const std::string& CategoricalTable::value(std::size_t individual, std::size_t variable) const {
    if (individual >= rows_.size() || variable >= variables_.size())
        throw InvalidInput("categorical table: cell index out of range");
    return rows_[individual][variable];
}

std::size_t CategoricalTable::category_index(std::size_t variable, const std::string& label) const {
    if (variable >= variables_.size())
        throw InvalidInput("categorical table: variable index out of range");
    const auto& dict = variables_[variable].categories;
    const auto it = std::find(dict.begin(), dict.end(), label);
    if (it == dict.end())
        throw InvalidInput("categorical table: unknown label '" + label + "' for variable '" +
                           variables_[variable].name + "'");
    return static_cast<std::size_t>(it - dict.begin());
}

std::size_t CategoricalTable::total_category_count() const {
    std::size_t total = 0;
    for (const auto& variable : variables_) total += variable.categories.size();
    return total;
}

namespace {

std::vector<ColumnCategory> column_categories(const CategoricalTable& table) {
    std::vector<ColumnCategory> columns;
    columns.reserve(table.total_category_count());
    const auto& variables = table.variables();
    for (std::size_t v = 0; v < variables.size(); ++v)
        for (std::size_t c = 0; c < variables[v].categories.size(); ++c)
            columns.push_back({v, c, variables[v].name + "=" + variables[v].categories[c]});
    return columns;
}

} // namespace

EncodedTable disjunctive_table(const CategoricalTable& table) {
    EncodedTable encoded;
    encoded.kind = EncodingKind::Cdt;
    encoded.columns = column_categories(table);
    const std::size_t n = table.individual_count();
    const std::size_t c_total = table.total_category_count();
    encoded.values = Matrix(n, c_total);

    std::vector<std::size_t> offsets(table.variable_count(), 0);
    for (std::size_t v = 1; v < table.variable_count(); ++v)
        offsets[v] = offsets[v - 1] + table.variables()[v - 1].categories.size();

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t v = 0; v < table.variable_count(); ++v)
            encoded.values(i, offsets[v] + table.category_index(v, table.value(i, v))) = 1.0;
    return encoded;
}

EncodedTable burt_table(const CategoricalTable& table) {
    const EncodedTable cdt = disjunctive_table(table);
    const std::size_t n = cdt.values.rows();
    const std::size_t c_total = cdt.values.cols();

    EncodedTable encoded;
    encoded.kind = EncodingKind::Burt;
    encoded.columns = cdt.columns;
    encoded.values = Matrix(c_total, c_total);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = cdt.values.row(i);
        for (std::size_t a = 0; a < c_total; ++a) {
            if (row[a] == 0.0) continue;
            for (std::size_t b = 0; b < c_total; ++b)
                if (row[b] != 0.0) encoded.values(a, b) += row[a] * row[b];
        }
    }
    return encoded;
}

CaTransformResult ca_transform(const EncodedTable& encoded) {
    const Matrix& t = encoded.values;
    const std::size_t rows = t.rows();
    const std::size_t cols = t.cols();
    if (rows == 0 || cols == 0) throw InvalidInput("ca_transform: empty table");
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (t(i, j) < 0.0) throw InvalidInput("ca_transform: negative entry");

    std::vector<double> col_sum(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) col_sum[j] += t(i, j);

    CaTransformResult result;
    for (std::size_t j = 0; j < cols; ++j) {
        if (col_sum[j] > 0.0) {
            result.kept_columns.push_back(j);
        } else {
            const std::string name = j < encoded.columns.size()
                                         ? encoded.columns[j].label
                                         : "column " + std::to_string(j);
            result.warnings.push_back("dropping all-zero column " + std::to_string(j) + " (" +
                                      name + ")");
        }
    }

    double grand_total = 0.0;
    std::vector<double> row_sum(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j : result.kept_columns) row_sum[i] += t(i, j);
        if (row_sum[i] <= 0.0)
            throw InvalidInput("ca_transform: row " + std::to_string(i) + " is all zero");
        grand_total += row_sum[i];
    }

    result.values = Matrix(rows, result.kept_columns.size());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t jj = 0; jj < result.kept_columns.size(); ++jj) {
            const std::size_t j = result.kept_columns[jj];
            result.values(i, jj) = t(i, j) / (row_sum[i] * std::sqrt(col_sum[j] / grand_total));
        }
    return result;
}

CategoricalMapResult categorical_som_train(const CategoricalTable& table, EncodingKind kind,
                                           const MapLattice& lattice,
                                           const NeighborhoodSchedule& schedule,
                                           std::uint64_t seed) {
    const EncodedTable encoded = kind == EncodingKind::Cdt ? disjunctive_table(table)
                                                           : burt_table(table);
    CaTransformResult transformed = ca_transform(encoded);

    CategoricalMapResult result;
    result.warnings = std::move(transformed.warnings);
    result.row_labels.reserve(transformed.values.rows());
    for (std::size_t i = 0; i < transformed.values.rows(); ++i)
        result.row_labels.push_back(kind == EncodingKind::Cdt ? "individual " + std::to_string(i)
                                                              : encoded.columns[i].label);
    result.map = batch_som_train(transformed.values, lattice, schedule, seed);
    result.transformed = std::move(transformed.values);
    return result;
}

} // namespace ncd
