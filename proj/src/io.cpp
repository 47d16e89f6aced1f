#include "ncd/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ncd {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open file: " + path);
    return in;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool skippable(const std::string& line) { return line.empty() || line.front() == '#'; }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(strip(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_double(const std::string& cell, const std::string& path, std::size_t line_no) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw InvalidInput(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    return value;
}

} // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip(line);
        if (skippable(stripped)) continue;
        const std::vector<std::string> cells = split_csv(stripped);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) row.push_back(parse_double(cell, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size()) + " columns, got " +
                               std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidInput(path + ": no data rows");
    return Matrix::from_rows(rows);
}

void write_csv_matrix(const std::string& path, const Matrix& values) {
    std::string out;
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(values(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<double> read_series_csv(const std::string& path) {
    const Matrix m = read_csv_matrix(path);
    if (m.cols() != 1)
        throw InvalidInput(path + ": expected a single value column, got " +
                           std::to_string(m.cols()));
    std::vector<double> series(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) series[i] = m(i, 0);
    return series;
}

TwoScaleSeries read_two_scale_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::vector<double>> rows;
    TwoScaleSeries series;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip(line);
        if (skippable(stripped)) continue;
        const std::vector<std::string> cells = split_csv(stripped);
        if (cells.size() < 3)
            throw InvalidInput(path + ":" + std::to_string(line_no) +
                               ": need at least two values plus a metadata label");
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t j = 0; j + 1 < cells.size(); ++j)
            row.push_back(parse_double(cells[j], path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(rows.front().size() + 1) + " columns, got " +
                               std::to_string(cells.size()));
        rows.push_back(std::move(row));
        series.metadata.push_back(cells.back());
    }
    if (rows.empty()) throw InvalidInput(path + ": no data rows");
    series.values = Matrix::from_rows(rows);
    series.validate();
    return series;
}

CategoricalTable read_categorical_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip(line);
        if (skippable(stripped)) continue;
        std::vector<std::string> cells = split_csv(stripped);
        if (header.empty()) {
            header = std::move(cells);
            continue;
        }
        if (cells.size() != header.size())
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns, got " +
                               std::to_string(cells.size()));
        rows.push_back(std::move(cells));
    }
    if (header.empty()) throw InvalidInput(path + ": missing header line");
    if (rows.empty()) throw InvalidInput(path + ": no data rows");
    return CategoricalTable::inferred(std::move(header), std::move(rows));
}

Matrix read_edge_list(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t max_vertex = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip(line);
        if (skippable(stripped)) continue;
        std::istringstream stream(stripped);
        long long u = -1, v = -1;
        if (!(stream >> u >> v) || u < 0 || v < 0)
            throw InvalidInput(path + ":" + std::to_string(line_no) +
                               ": expected two nonnegative vertex indices");
        std::string rest;
        if (stream >> rest)
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": trailing content '" +
                               rest + "'");
        if (u == v)
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": self-loop on vertex " +
                               std::to_string(u));
        edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        max_vertex = std::max({max_vertex, edges.back().first, edges.back().second});
    }
    if (edges.empty()) throw InvalidInput(path + ": no edges");
    Matrix adjacency(max_vertex + 1, max_vertex + 1);
    for (const auto& [u, v] : edges) {
        adjacency(u, v) = 1.0;
        adjacency(v, u) = 1.0;
    }
    return adjacency;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write file: " + path);
    out << content;
    if (!out) throw InvalidInput("failed while writing file: " + path);
}

} // namespace ncd
