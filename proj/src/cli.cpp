#include "ncd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ncd/categorical.hpp"
#include "ncd/forecast.hpp"
#include "ncd/hmm_mlp.hpp"
#include "ncd/io.hpp"
#include "ncd/metric.hpp"
#include "ncd/mlp.hpp"
#include "ncd/model_selection.hpp"
#include "ncd/serialize.hpp"
#include "ncd/som.hpp"
#include "ncd/som_variants.hpp"
#include "ncd/svg.hpp"

namespace fs = std::filesystem;

namespace ncd {

namespace {

enum class KeyType { Text, Real, Count, Choice, Path };

struct KeySpec {
    std::string name;
    KeyType type = KeyType::Text;
    std::string fallback;
    bool required = false;
    std::vector<std::string> choices;
    std::string help;
};

std::vector<KeySpec> base_keys() {
    return {
        {"out", KeyType::Text, "out", false, {}, "output directory"},
        {"seed", KeyType::Count, "42", false, {}, "seed for all randomness"},
    };
}

std::vector<KeySpec> lattice_keys() {
    return {
        {"lattice", KeyType::Choice, "grid", false, {"grid", "string"}, "map arrangement"},
        {"rows", KeyType::Count, "4", false, {}, "grid rows"},
        {"cols", KeyType::Count, "4", false, {}, "grid columns"},
        {"length", KeyType::Count, "8", false, {}, "string length"},
        {"latticeMetric", KeyType::Choice, "euclidean", false, {"euclidean", "manhattan"},
         "distance between neuron coordinates"},
    };
}

std::vector<KeySpec> schedule_keys() {
    return {
        {"neighborhood", KeyType::Choice, "gaussian", false, {"gaussian", "window"},
         "neighborhood weighting"},
        {"radius0", KeyType::Real, "3", false, {}, "radius at the first sweep"},
        {"radius1", KeyType::Real, "0.5", false, {}, "radius at the last sweep"},
        {"sweeps", KeyType::Count, "30", false, {}, "training sweeps"},
    };
}

KeySpec svg_key(const std::string& fallback) {
    return {"svg", KeyType::Choice, fallback, false, {"umatrix", "counts", "none"},
            "map rendering to emit"};
}

void append(std::vector<KeySpec>& keys, std::vector<KeySpec> extra) {
    for (auto& key : extra) keys.push_back(std::move(key));
}

std::vector<KeySpec> command_keys(const std::string& command) {
    std::vector<KeySpec> keys = base_keys();
    if (command == "som-train") {
        append(keys, lattice_keys());
        append(keys, schedule_keys());
        append(keys, {{"data", KeyType::Path, "", true, {}, "numeric CSV of observations"},
                      svg_key("umatrix")});
    } else if (command == "som-median") {
        append(keys, lattice_keys());
        append(keys, schedule_keys());
        append(keys, {{"matrix", KeyType::Path, "", false, {}, "dissimilarity CSV"},
                      {"data", KeyType::Path, "", false, {},
                       "numeric CSV; pairwise Euclidean distances are computed"},
                      {"q", KeyType::Count, "1", false, {}, "prototypes per neuron"}});
    } else if (command == "som-kernel") {
        append(keys, lattice_keys());
        append(keys, schedule_keys());
        append(keys, {{"matrix", KeyType::Path, "", false, {}, "kernel (Gram) CSV"},
                      {"data", KeyType::Path, "", false, {},
                       "numeric CSV; the Gram matrix is computed with 'kernel'"},
                      {"graph", KeyType::Path, "", false, {},
                       "edge list; the heat kernel exp(-beta L) is computed"},
                      {"kernel", KeyType::Choice, "linear", false, {"linear", "rbf", "poly"},
                       "kernel for 'data' input"},
                      {"gamma", KeyType::Real, "1", false, {}, "rbf kernel width"},
                      {"degree", KeyType::Count, "2", false, {}, "polynomial kernel degree"},
                      {"offset", KeyType::Real, "1", false, {}, "polynomial kernel offset"},
                      {"beta", KeyType::Real, "1", false, {}, "heat kernel diffusion time"},
                      svg_key("counts")});
    } else if (command == "som-cat") {
        append(keys, lattice_keys());
        append(keys, schedule_keys());
        append(keys, {{"data", KeyType::Path, "", true, {}, "categorical CSV with header"},
                      {"encoding", KeyType::Choice, "cdt", false, {"cdt", "burt"},
                       "cdt clusters individuals, burt clusters categories"},
                      svg_key("umatrix")});
    } else if (command == "mlp-select") {
        append(keys,
               {{"data", KeyType::Path, "", true, {}, "series CSV or pairs CSV (see 'mode')"},
                {"mode", KeyType::Choice, "series", false, {"series", "pairs"},
                 "series: single column embedded with 'order'; pairs: last column is the target"},
                {"order", KeyType::Count, "1", false, {}, "autoregressive order for series mode"},
                {"maxK", KeyType::Count, "8", false, {}, "largest hidden-unit count to consider"},
                {"penalty", KeyType::Choice, "logOverN", false, {"logOverN", "sqrtOverN"},
                 "penalty family"},
                {"multiplier", KeyType::Real, "1", false, {}, "penalty multiplier"},
                {"restarts", KeyType::Count, "5", false, {}, "training restarts per candidate"},
                {"iterations", KeyType::Count, "400", false, {}, "gradient steps per restart"},
                {"transfer", KeyType::Choice, "tanh", false, {"tanh", "logistic"},
                 "hidden-layer transfer"}});
    } else if (command == "hmm-sim") {
        append(keys, {{"model", KeyType::Path, "", true, {}, "hybrid model JSON"},
                      {"length", KeyType::Count, "100", false, {}, "values to simulate"},
                      {"warm", KeyType::Text, "", false, {},
                       "comma-separated conditioning values (default: zeros)"}});
    } else if (command == "hmm-fit") {
        append(keys, {{"data", KeyType::Path, "", true, {}, "single-column series CSV"},
                      {"states", KeyType::Count, "2", false, {}, "hidden states"},
                      {"order", KeyType::Count, "1", false, {}, "autoregressive order"},
                      {"hidden", KeyType::Count, "2", false, {}, "hidden units per regressor"},
                      {"iterations", KeyType::Count, "50", false, {}, "EM rounds"},
                      {"refine", KeyType::Count, "8", false, {},
                       "regressor descent steps per M-step"},
                      {"restarts", KeyType::Count, "2", false, {}, "initial fit restarts"},
                      {"trainIterations", KeyType::Count, "150", false, {},
                       "initial fit gradient steps"}});
    } else if (command == "forecast") {
        append(keys, lattice_keys());
        append(keys, schedule_keys());
        append(keys,
               {{"data", KeyType::Path, "", true, {},
                 "two-scale CSV: fast values then a metadata label per row"},
                {"label", KeyType::Text, "", true, {}, "metadata label of the next slow step"},
                {"method", KeyType::Choice, "seasonalNaive", false, {"seasonalNaive", "ar"},
                 "mean/scale forecaster"},
                {"period", KeyType::Count, "1", false, {}, "seasonal-naive period"},
                {"arOrder", KeyType::Count, "1", false, {}, "autoregression order"}});
    } else {
        throw InvalidInput("unknown command '" + command + "'");
    }
    return keys;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"som-train", "som-median", "som-kernel",
                                                   "som-cat",   "mlp-select", "hmm-sim",
                                                   "hmm-fit",   "forecast"};
    return names;
}

std::string command_summary(const std::string& command) {
    if (command == "som-train") return "batch self-organizing map on vector data";
    if (command == "som-median") return "median map on a dissimilarity matrix (q prototypes)";
    if (command == "som-kernel") return "self-organizing map in kernel feature space";
    if (command == "som-cat") return "self-organizing map on encoded categorical data";
    if (command == "mlp-select") return "penalized hidden-unit selection for an MLP";
    if (command == "hmm-sim") return "simulate a regime-switching autoregression";
    if (command == "hmm-fit") return "fit a regime-switching autoregression by generalized EM";
    if (command == "forecast") return "two-scale profile clustering and one-step forecast";
    return "";
}

std::string strip_spaces(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

void check_value(const KeySpec& spec, const std::string& value) {
    switch (spec.type) {
        case KeyType::Text:
            return;
        case KeyType::Real: {
            double parsed = 0.0;
            const auto [ptr, ec] =
                std::from_chars(value.data(), value.data() + value.size(), parsed);
            if (ec != std::errc{} || ptr != value.data() + value.size())
                throw InvalidInput("config key '" + spec.name + "' expects a real number, got '" +
                                   value + "'");
            return;
        }
        case KeyType::Count: {
            unsigned long long parsed = 0;
            const auto [ptr, ec] =
                std::from_chars(value.data(), value.data() + value.size(), parsed);
            if (ec != std::errc{} || ptr != value.data() + value.size())
                throw InvalidInput("config key '" + spec.name +
                                   "' expects a nonnegative integer, got '" + value + "'");
            return;
        }
        case KeyType::Choice: {
            if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
                std::string options;
                for (const auto& choice : spec.choices) {
                    if (!options.empty()) options += ", ";
                    options += choice;
                }
                throw InvalidInput("config key '" + spec.name + "' expects one of {" + options +
                                   "}, got '" + value + "'");
            }
            return;
        }
        case KeyType::Path: {
            if (!value.empty() && !fs::exists(value))
                throw InvalidInput("config key '" + spec.name + "' references a missing file: " +
                                   value);
            return;
        }
    }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::map<std::string, std::string> entries;
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip_spaces(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InvalidInput(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value', got '" + stripped + "'");
        const std::string key = strip_spaces(stripped.substr(0, eq));
        const std::string value = strip_spaces(stripped.substr(eq + 1));
        if (key.empty())
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": empty key");
        entries[key] = value;
    }
    return entries;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& key) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string cell = strip_spaces(
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!cell.empty()) {
            double parsed = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw InvalidInput("config key '" + key + "': not a number: '" + cell + "'");
            values.push_back(parsed);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

MapLattice lattice_from(const RunConfig& config) {
    const LatticeMetric metric = config.at("latticeMetric") == "manhattan"
                                     ? LatticeMetric::Manhattan
                                     : LatticeMetric::Euclidean;
    if (config.at("lattice") == "string") return MapLattice::string(config.count("length"), metric);
    return MapLattice::grid(config.count("rows"), config.count("cols"), metric);
}

NeighborhoodSchedule schedule_from(const RunConfig& config) {
    NeighborhoodSchedule schedule;
    schedule.kind = config.at("neighborhood") == "window" ? NeighborhoodKind::Window
                                                          : NeighborhoodKind::Gaussian;
    schedule.initial_radius = config.real("radius0");
    schedule.final_radius = config.real("radius1");
    schedule.sweep_count = config.count("sweeps");
    schedule.validate();
    return schedule;
}

Json lattice_to_json(const MapLattice& lattice) {
    Json j;
    j["shape"] = lattice.shape() == LatticeShape::Grid ? "grid" : "string";
    j["rows"] = lattice.rows();
    j["cols"] = lattice.cols();
    j["metric"] = lattice.metric() == LatticeMetric::Manhattan ? "manhattan" : "euclidean";
    j["neuronCount"] = lattice.neuron_count();
    return j;
}

void write_artifact(const fs::path& dir, const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
}

std::string trace_csv(const std::string& value_name, std::span<const double> values) {
    std::string out = "sweep," + value_name + "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out += std::to_string(i) + "," + format_double(values[i]) + "\n";
    return out;
}

void emit_svg(const fs::path& dir, const RunConfig& config, const MapLattice& lattice,
              const Matrix& prototypes, const std::vector<std::size_t>& assignments) {
    const std::string& mode = config.at("svg");
    if (mode == "none") return;
    const std::vector<double> values =
        mode == "counts" ? neuron_count_values(assignments, lattice.neuron_count())
                         : u_matrix_values(prototypes, lattice);
    const std::string title = mode == "counts" ? "assignment counts" : "u-matrix";
    write_artifact(dir, "map.svg", render_lattice_svg(lattice, values, title));
}

Matrix pairwise_euclidean(const Matrix& data) {
    const std::size_t n = data.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = std::sqrt(squared_distance(data.row(i), data.row(j)));
            d(i, j) = dist;
            d(j, i) = dist;
        }
    return d;
}

void run_som_train(const RunConfig& config, const fs::path& dir) {
    const Matrix data = read_csv_matrix(config.at("data"));
    const MapLattice lattice = lattice_from(config);
    const NeighborhoodSchedule schedule = schedule_from(config);
    const BatchSomResult result = batch_som_train(data, lattice, schedule, config.count("seed"));
    const MapQuality quality = map_quality(data, result.prototypes, lattice);

    Json map;
    map["formatVersion"] = kFormatVersion;
    map["type"] = "som-map";
    map["lattice"] = lattice_to_json(lattice);
    map["prototypes"] = matrix_to_json(result.prototypes);
    map["assignments"] = result.assignments;
    map["energyTrace"] = result.energy_trace;
    map["quality"] = {{"quantizationError", quality.quantization_error},
                      {"topographicError", quality.topographic_error}};
    write_artifact(dir, "map.json", dump_artifact(map));
    write_artifact(dir, "trace.csv", trace_csv("energy", result.energy_trace));
    emit_svg(dir, config, lattice, result.prototypes, result.assignments);
}

DissimilarityMatrix dissimilarity_input(const RunConfig& config) {
    const bool has_matrix = !config.at("matrix").empty();
    const bool has_data = !config.at("data").empty();
    if (has_matrix == has_data)
        throw InvalidInput("som-median needs exactly one of 'matrix' or 'data'");
    if (has_matrix) return DissimilarityMatrix::validated(read_csv_matrix(config.at("matrix")));
    return DissimilarityMatrix::validated(pairwise_euclidean(read_csv_matrix(config.at("data"))));
}

void run_som_median(const RunConfig& config, const fs::path& dir) {
    const DissimilarityMatrix d = dissimilarity_input(config);
    const MapLattice lattice = lattice_from(config);
    const NeighborhoodSchedule schedule = schedule_from(config);
    const std::size_t q = config.count("q");
    if (q == 0) throw InvalidInput("config key 'q' must be >= 1");

    Json map;
    map["formatVersion"] = kFormatVersion;
    map["lattice"] = lattice_to_json(lattice);
    std::vector<double> trace;
    if (q == 1) {
        const MedianMapState state =
            median_som_train(d, lattice, schedule, config.count("seed"));
        map["type"] = "median-map";
        map["prototypeIndices"] = state.prototype_indices;
        map["assignments"] = state.assignments;
        map["distortionTrace"] = state.distortion_trace;
        map["sweepsRun"] = state.sweeps_run;
        map["warnings"] = state.warnings;
        trace = state.distortion_trace;
    } else {
        const QMedianMapState state =
            q_median_som_train(d, lattice, schedule, q, config.count("seed"));
        map["type"] = "q-median-map";
        map["q"] = q;
        map["prototypeSets"] = state.prototype_sets;
        map["assignments"] = state.assignments;
        map["distortionTrace"] = state.distortion_trace;
        map["sweepsRun"] = state.sweeps_run;
        map["warnings"] = state.warnings;
        trace = state.distortion_trace;
    }
    write_artifact(dir, "map.json", dump_artifact(map));
    write_artifact(dir, "trace.csv", trace_csv("distortion", trace));
}

KernelMatrix kernel_input(const RunConfig& config) {
    const bool has_matrix = !config.at("matrix").empty();
    const bool has_data = !config.at("data").empty();
    const bool has_graph = !config.at("graph").empty();
    if (static_cast<int>(has_matrix) + static_cast<int>(has_data) + static_cast<int>(has_graph) !=
        1)
        throw InvalidInput("som-kernel needs exactly one of 'matrix', 'data' or 'graph'");
    if (has_matrix) return KernelMatrix::validated(read_csv_matrix(config.at("matrix")));
    if (has_graph)
        return heat_kernel_matrix(read_edge_list(config.at("graph")), config.real("beta"));

    const Matrix data = read_csv_matrix(config.at("data"));
    const std::string& kind = config.at("kernel");
    VectorKernel kernel;
    if (kind == "linear") {
        kernel = [](std::span<const double> a, std::span<const double> b) {
            return linear_kernel(a, b);
        };
    } else if (kind == "rbf") {
        const double gamma = config.real("gamma");
        kernel = [gamma](std::span<const double> a, std::span<const double> b) {
            return rbf_kernel(a, b, gamma);
        };
    } else {
        const unsigned degree = static_cast<unsigned>(config.count("degree"));
        const double offset = config.real("offset");
        kernel = [degree, offset](std::span<const double> a, std::span<const double> b) {
            return poly_kernel(a, b, degree, offset);
        };
    }
    return gram_matrix(data, kernel);
}

void run_som_kernel(const RunConfig& config, const fs::path& dir) {
    const KernelMatrix kernel = kernel_input(config);
    const MapLattice lattice = lattice_from(config);
    const NeighborhoodSchedule schedule = schedule_from(config);
    const KernelMapState state =
        kernel_som_train(kernel, lattice, schedule, config.count("seed"));

    Json map;
    map["formatVersion"] = kFormatVersion;
    map["type"] = "kernel-map";
    map["lattice"] = lattice_to_json(lattice);
    map["coefficients"] = matrix_to_json(state.gamma);
    map["assignments"] = state.assignments;
    map["energyTrace"] = state.energy_trace;
    write_artifact(dir, "map.json", dump_artifact(map));
    write_artifact(dir, "trace.csv", trace_csv("energy", state.energy_trace));

    const std::string& mode = config.at("svg");
    if (mode == "none") return;
    const std::size_t m = lattice.neuron_count();
    std::vector<double> values;
    std::string title;
    if (mode == "counts") {
        values = neuron_count_values(state.assignments, m);
        title = "assignment counts";
    } else {
        // U-matrix from implicit prototype distances:
        //   |p_c - p_d|^2 = g_c K g_c - 2 g_c K g_d + g_d K g_d.
        const std::size_t n = kernel.size();
        Matrix cross(m, m);
        Matrix gk(m, n);
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += state.gamma(c, i) * kernel(i, j);
                gk(c, j) = s;
            }
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t e = 0; e < m; ++e) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += gk(c, j) * state.gamma(e, j);
                cross(c, e) = s;
            }
        values.assign(m, 0.0);
        for (std::size_t c = 0; c < m; ++c) {
            double total = 0.0;
            std::size_t neighbors = 0;
            for (std::size_t e = 0; e < m; ++e) {
                if (e == c || !lattice.are_neighbors(c, e)) continue;
                total += std::sqrt(std::max(0.0, cross(c, c) - 2.0 * cross(c, e) + cross(e, e)));
                ++neighbors;
            }
            values[c] = neighbors > 0 ? total / static_cast<double>(neighbors) : 0.0;
        }
        title = "u-matrix";
    }
    write_artifact(dir, "map.svg", render_lattice_svg(lattice, values, title));
}

void run_som_cat(const RunConfig& config, const fs::path& dir) {
    const CategoricalTable table = read_categorical_csv(config.at("data"));
    const EncodingKind kind =
        config.at("encoding") == "burt" ? EncodingKind::Burt : EncodingKind::Cdt;
    const MapLattice lattice = lattice_from(config);
    const NeighborhoodSchedule schedule = schedule_from(config);
    const CategoricalMapResult result =
        categorical_som_train(table, kind, lattice, schedule, config.count("seed"));

    Json map;
    map["formatVersion"] = kFormatVersion;
    map["type"] = "categorical-map";
    map["encoding"] = config.at("encoding");
    map["lattice"] = lattice_to_json(lattice);
    map["prototypes"] = matrix_to_json(result.map.prototypes);
    map["assignments"] = result.map.assignments;
    map["rowLabels"] = result.row_labels;
    map["energyTrace"] = result.map.energy_trace;
    map["warnings"] = result.warnings;
    write_artifact(dir, "map.json", dump_artifact(map));
    write_artifact(dir, "trace.csv", trace_csv("energy", result.map.energy_trace));
    emit_svg(dir, config, lattice, result.map.prototypes, result.map.assignments);
}

void run_mlp_select(const RunConfig& config, const fs::path& dir) {
    std::vector<TrainingPair> pairs;
    if (config.at("mode") == "series") {
        const std::vector<double> series = read_series_csv(config.at("data"));
        pairs = embed_autoregressive(series, config.count("order"));
    } else {
        const Matrix table = read_csv_matrix(config.at("data"));
        if (table.cols() < 2)
            throw InvalidInput("pairs mode needs at least one input column plus the target");
        pairs.reserve(table.rows());
        for (std::size_t i = 0; i < table.rows(); ++i) {
            const auto row = table.row(i);
            pairs.push_back({{row.begin(), row.end() - 1}, row.back()});
        }
    }

    TrainConfig train;
    train.max_iterations = static_cast<int>(config.count("iterations"));
    train.restarts = static_cast<int>(config.count("restarts"));
    train.transfer = config.at("transfer") == "logistic" ? Transfer::Logistic : Transfer::Tanh;

    PenaltySpec penalty;
    penalty.kind = config.at("penalty") == "sqrtOverN" ? PenaltyKind::SqrtOverN
                                                       : PenaltyKind::LogOverN;
    penalty.multiplier = config.real("multiplier");

    const SelectionResult result = select_hidden_units(pairs, config.count("maxK"), penalty,
                                                       train, config.count("seed"));

    Json model;
    model["formatVersion"] = kFormatVersion;
    model["type"] = "mlp-selection";
    model["chosenK"] = result.trace.chosen_k;
    model["mse"] = result.mse;
    model["model"] = mlp_to_json(result.model);
    Json rows = Json::array();
    for (const SelectionRow& row : result.trace.per_k)
        rows.push_back({{"k", row.k},
                        {"mse", row.mse},
                        {"penalty", row.penalty},
                        {"score", row.score}});
    model["trace"] = std::move(rows);
    write_artifact(dir, "model.json", dump_artifact(model));

    std::string csv = "k,mse,penalty,score\n";
    for (const SelectionRow& row : result.trace.per_k)
        csv += std::to_string(row.k) + "," + format_double(row.mse) + "," +
               format_double(row.penalty) + "," + format_double(row.score) + "\n";
    write_artifact(dir, "trace.csv", csv);
}

void run_hmm_sim(const RunConfig& config, const fs::path& dir) {
    const HmmMlpParams params =
        hmm_from_json(parse_json(read_text_file(config.at("model")), config.at("model")));
    std::vector<double> warm = parse_real_list(config.at("warm"), "warm");
    if (warm.empty()) warm.assign(params.order, 0.0);
    const SimulatedSeries sim =
        simulate(params, config.count("length"), warm, config.count("seed"));

    std::string csv = "value,state\n";
    for (std::size_t t = 0; t < sim.values.size(); ++t)
        csv += format_double(sim.values[t]) + "," + std::to_string(sim.states[t]) + "\n";
    write_artifact(dir, "sim.csv", csv);

    std::vector<std::size_t> counts(params.state_count, 0);
    for (std::size_t s : sim.states) ++counts[s];
    Json report;
    report["formatVersion"] = kFormatVersion;
    report["type"] = "hmm-simulation";
    report["length"] = sim.values.size();
    report["stateCounts"] = counts;
    report["warmStart"] = warm;
    write_artifact(dir, "report.json", dump_artifact(report));
}

void run_hmm_fit(const RunConfig& config, const fs::path& dir) {
    const std::vector<double> series = read_series_csv(config.at("data"));
    GemConfig gem;
    gem.iterations = config.count("iterations");
    gem.hidden_count = config.count("hidden");
    gem.refine_iterations = static_cast<int>(config.count("refine"));
    gem.train.restarts = static_cast<int>(config.count("restarts"));
    gem.train.max_iterations = static_cast<int>(config.count("trainIterations"));

    const GemResult result =
        gem_fit(series, config.count("states"), config.count("order"), gem, config.count("seed"));

    write_artifact(dir, "model.json", dump_artifact(hmm_to_json(result.params)));

    Json report;
    report["formatVersion"] = kFormatVersion;
    report["type"] = "hmm-fit-report";
    report["finalLogLikelihood"] = result.log_likelihood_trace.back();
    report["logLikelihoodTrace"] = result.log_likelihood_trace;
    report["warnings"] = result.warnings;
    write_artifact(dir, "report.json", dump_artifact(report));

    std::string csv = "round,logLikelihood\n";
    for (std::size_t i = 0; i < result.log_likelihood_trace.size(); ++i)
        csv += std::to_string(i) + "," + format_double(result.log_likelihood_trace[i]) + "\n";
    write_artifact(dir, "trace.csv", csv);
}

void run_forecast(const RunConfig& config, const fs::path& dir) {
    const TwoScaleSeries series = read_two_scale_csv(config.at("data"));
    const MapLattice lattice = lattice_from(config);
    const NeighborhoodSchedule schedule = schedule_from(config);
    ForecastMethod method;
    method.kind = config.at("method") == "ar" ? ForecastMethod::Kind::Ar
                                              : ForecastMethod::Kind::SeasonalNaive;
    method.period = config.count("period");
    method.order = config.count("arOrder");

    const VectorForecast forecast = forecast_next_vector(series, config.at("label"), lattice,
                                                         schedule, method, config.count("seed"));

    Matrix row(1, forecast.values.size());
    std::copy(forecast.values.begin(), forecast.values.end(), row.row(0).begin());
    write_csv_matrix((dir / "prediction.csv").string(), row);

    Json report;
    report["formatVersion"] = kFormatVersion;
    report["type"] = "forecast";
    report["label"] = config.at("label");
    report["mean"] = forecast.mean;
    report["scale"] = forecast.scale;
    report["fallback"] = forecast.fallback;
    report["values"] = forecast.values;
    write_artifact(dir, "report.json", dump_artifact(report));
}

} // namespace

const std::string& RunConfig::at(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end())
        throw InvalidInput("command " + command + " does not declare config key '" + key + "'");
    return it->second;
}

double RunConfig::real(const std::string& key) const {
    const std::string& value = at(key);
    double parsed = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw InvalidInput("config key '" + key + "' expects a real number, got '" + value + "'");
    return parsed;
}

std::size_t RunConfig::count(const std::string& key) const {
    const std::string& value = at(key);
    unsigned long long parsed = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw InvalidInput("config key '" + key + "' expects a nonnegative integer, got '" +
                           value + "'");
    return static_cast<std::size_t>(parsed);
}

std::string RunConfig::resolved_text() const {
    std::string out = "command = " + command + "\n";
    for (const auto& [key, value] : values) out += key + " = " + value + "\n";
    return out;
}

RunConfig parse_config(const std::string& command, const std::string& config_path,
                       const std::vector<std::string>& overrides) {
    const std::vector<KeySpec> keys = command_keys(command);

    std::map<std::string, std::string> entries;
    if (!config_path.empty()) entries = read_config_file(config_path);
    for (const std::string& override_text : overrides) {
        const auto eq = override_text.find('=');
        if (eq == std::string::npos || eq == 0)
            throw InvalidInput("override '" + override_text + "' must look like key=value");
        entries[strip_spaces(override_text.substr(0, eq))] =
            strip_spaces(override_text.substr(eq + 1));
    }

    for (const auto& [key, value] : entries) {
        const auto it = std::find_if(keys.begin(), keys.end(),
                                     [&](const KeySpec& spec) { return spec.name == key; });
        if (it == keys.end())
            throw InvalidInput("unknown config key '" + key + "' for command " + command);
        check_value(*it, value);
    }

    RunConfig config;
    config.command = command;
    for (const KeySpec& spec : keys) {
        const auto it = entries.find(spec.name);
        if (it != entries.end()) {
            config.values[spec.name] = it->second;
        } else if (spec.required) {
            throw InvalidInput("missing required config key '" + spec.name + "' for command " +
                               command);
        } else {
            config.values[spec.name] = spec.fallback;
        }
    }
    return config;
}

void run_command(const RunConfig& config) {
    const fs::path dir(config.at("out"));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidInput("cannot create output directory: " + dir.string());
    write_artifact(dir, "resolved.cfg", config.resolved_text());

    if (config.command == "som-train") return run_som_train(config, dir);
    if (config.command == "som-median") return run_som_median(config, dir);
    if (config.command == "som-kernel") return run_som_kernel(config, dir);
    if (config.command == "som-cat") return run_som_cat(config, dir);
    if (config.command == "mlp-select") return run_mlp_select(config, dir);
    if (config.command == "hmm-sim") return run_hmm_sim(config, dir);
    if (config.command == "hmm-fit") return run_hmm_fit(config, dir);
    if (config.command == "forecast") return run_forecast(config, dir);
    throw InvalidInput("unknown command '" + config.command + "'");
}

std::string describe_commands() {
    std::string out;
    for (const std::string& name : command_names()) {
        out += name + ": " + command_summary(name) + "\n";
        for (const KeySpec& spec : command_keys(name)) {
            out += "  " + spec.name;
            switch (spec.type) {
                case KeyType::Text: out += " (text"; break;
                case KeyType::Real: out += " (real"; break;
                case KeyType::Count: out += " (integer"; break;
                case KeyType::Choice: {
                    out += " (one of ";
                    for (std::size_t i = 0; i < spec.choices.size(); ++i)
                        out += (i ? "|" : "") + spec.choices[i];
                    break;
                }
                case KeyType::Path: out += " (path"; break;
            }
            out += spec.required ? ", required)" : ", default '" + spec.fallback + "')";
            out += " — " + spec.help + "\n";
        }
        out += "\n";
    }
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Self-organizing maps (batch, median, kernel, categorical), penalized MLP "
                 "selection, regime-switching autoregression, and two-scale forecasting."};
    app.require_subcommand(1);

    struct SubArgs {
        std::string config_path;
        std::vector<std::string> overrides;
    };
    std::map<std::string, SubArgs> args;
    for (const std::string& name : command_names()) {
        CLI::App* sub = app.add_subcommand(name, command_summary(name));
        sub->add_option("-c,--config", args[name].config_path,
                        "flat key = value config file");
        sub->add_option("overrides", args[name].overrides, "key=value overrides (win over file)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        run_command(parse_config(command, args[command].config_path, args[command].overrides));
        return 0;
    } catch (const InvalidInput& e) {
        std::cerr << "ncd: invalid input: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "ncd: numeric error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ncd: numeric error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace ncd
