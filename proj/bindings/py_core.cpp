// Python bindings for the ncd core. The module mirrors the C++ API closely:
// value types are exposed as classes, training entry points take plain lists
// (converted to Matrix / training pairs on the way in), and the two exception
// roots map to ValueError and ArithmeticError subclasses.

#include <optional>
#include <utility>
#include <vector>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncd/categorical.hpp"
#include "ncd/common.hpp"
#include "ncd/forecast.hpp"
#include "ncd/hmm_mlp.hpp"
#include "ncd/metric.hpp"
#include "ncd/mlp.hpp"
#include "ncd/model_selection.hpp"
#include "ncd/som.hpp"
#include "ncd/som_variants.hpp"

namespace py = pybind11;
using namespace ncd;

namespace {

std::vector<TrainingPair> make_pairs(const std::vector<std::vector<double>>& inputs,
                                     const std::vector<double>& targets) {
    if (inputs.size() != targets.size())
        throw InvalidInput("inputs and targets must have the same length, got " +
                           std::to_string(inputs.size()) + " and " +
                           std::to_string(targets.size()));
    std::vector<TrainingPair> pairs(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        pairs[i].input = inputs[i];
        pairs[i].target = targets[i];
    }
    return pairs;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows[i].assign(m.row(i).begin(), m.row(i).end());
    return rows;
}

} // namespace

PYBIND11_MODULE(_ncd, m) {
    m.doc() = "Self-organizing maps over dissimilarity and kernel data, "
              "one-hidden-layer autoregression with penalized size selection, "
              "Markov-switching autoregression, categorical encodings and "
              "two-scale profile forecasting.";
    m.attr("__version__") = "1.0.0";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    // ---- common ----------------------------------------------------------

    py::class_<Matrix>(m, "Matrix", "Dense row-major matrix of floats.")
        .def(py::init<>())
        .def(py::init<std::size_t, std::size_t, double>(), py::arg("rows"), py::arg("cols"),
             py::arg("fill") = 0.0)
        .def(py::init([](const std::vector<std::vector<double>>& rows) {
                 return Matrix::from_rows(rows);
             }),
             py::arg("rows"))
        .def_static("from_rows", &Matrix::from_rows, py::arg("rows"))
        .def_property_readonly("rows", &Matrix::rows)
        .def_property_readonly("cols", &Matrix::cols)
        .def("at",
             [](const Matrix& self, std::size_t i, std::size_t j) {
                 if (i >= self.rows() || j >= self.cols())
                     throw InvalidInput("matrix index out of range");
                 return self(i, j);
             },
             py::arg("i"), py::arg("j"))
        .def("__getitem__",
             [](const Matrix& self, std::pair<std::size_t, std::size_t> ij) {
                 if (ij.first >= self.rows() || ij.second >= self.cols())
                     throw py::index_error("matrix index out of range");
                 return self(ij.first, ij.second);
             })
        .def("row",
             [](const Matrix& self, std::size_t i) {
                 if (i >= self.rows()) throw py::index_error("row index out of range");
                 return std::vector<double>(self.row(i).begin(), self.row(i).end());
             },
             py::arg("i"))
        .def("to_rows", &matrix_rows, "All entries as a list of row lists.")
        .def("__eq__", [](const Matrix& a, const Matrix& b) { return a == b; })
        .def("__repr__", [](const Matrix& self) {
            return "Matrix(" + std::to_string(self.rows()) + "x" + std::to_string(self.cols()) +
                   ")";
        });
    py::implicitly_convertible<py::list, Matrix>();

    m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"),
          "Stable seed derivation for independent random streams.");
    m.def("squared_distance",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              return squared_distance(a, b);
          },
          py::arg("a"), py::arg("b"));

    // ---- mlp ---------------------------------------------------------------

    py::enum_<Transfer>(m, "Transfer")
        .value("Tanh", Transfer::Tanh)
        .value("Logistic", Transfer::Logistic);

    py::class_<MlpParams>(m, "MlpParams",
                          "One-hidden-layer perceptron: intercept + sum of weighted transfers.")
        .def(py::init<>())
        .def_readwrite("input_dim", &MlpParams::input_dim)
        .def_readwrite("hidden_weights", &MlpParams::hidden_weights)
        .def_readwrite("hidden_biases", &MlpParams::hidden_biases)
        .def_readwrite("output_weights", &MlpParams::output_weights)
        .def_readwrite("intercept", &MlpParams::intercept)
        .def_readwrite("transfer", &MlpParams::transfer)
        .def("hidden_count", &MlpParams::hidden_count)
        .def("parameter_count", &MlpParams::parameter_count)
        .def("validate", &MlpParams::validate);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_iterations", &TrainConfig::max_iterations)
        .def_readwrite("restarts", &TrainConfig::restarts)
        .def_readwrite("gradient_tolerance", &TrainConfig::gradient_tolerance)
        .def_readwrite("initial_step", &TrainConfig::initial_step)
        .def_readwrite("init_scale", &TrainConfig::init_scale)
        .def_readwrite("transfer", &TrainConfig::transfer);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("params", &TrainResult::params)
        .def_readonly("loss", &TrainResult::loss)
        .def_readonly("restart_index", &TrainResult::restart_index)
        .def_readonly("diverged_restarts", &TrainResult::diverged_restarts);

    m.def("mlp_forward",
          [](const MlpParams& params, const std::vector<double>& x) {
              return mlp_forward(params, x);
          },
          py::arg("params"), py::arg("x"));
    m.def("mse_loss",
          [](const MlpParams& params, const std::vector<std::vector<double>>& inputs,
             const std::vector<double>& targets) {
              return mse_loss(params, make_pairs(inputs, targets));
          },
          py::arg("params"), py::arg("inputs"), py::arg("targets"));
    m.def("train_mlp",
          [](const std::vector<std::vector<double>>& inputs, const std::vector<double>& targets,
             std::size_t hidden_count, const TrainConfig& config, std::uint64_t seed) {
              return train_mlp(make_pairs(inputs, targets), hidden_count, config, seed);
          },
          py::arg("inputs"), py::arg("targets"), py::arg("hidden_count"),
          py::arg("config") = TrainConfig{}, py::arg("seed") = 1,
          "Full-batch seeded gradient descent, best of config.restarts restarts.");
    m.def("embed_autoregressive",
          [](const std::vector<double>& series, std::size_t order) {
              const std::vector<TrainingPair> pairs = embed_autoregressive(series, order);
              std::vector<std::vector<double>> inputs;
              std::vector<double> targets;
              inputs.reserve(pairs.size());
              targets.reserve(pairs.size());
              for (const TrainingPair& pair : pairs) {
                  inputs.push_back(pair.input);
                  targets.push_back(pair.target);
              }
              return std::make_pair(std::move(inputs), std::move(targets));
          },
          py::arg("series"), py::arg("order"),
          "Lag embedding: returns (inputs, targets) with inputs newest-first.");

    // ---- model selection ---------------------------------------------------

    py::enum_<PenaltyKind>(m, "PenaltyKind")
        .value("LogOverN", PenaltyKind::LogOverN)
        .value("SqrtOverN", PenaltyKind::SqrtOverN);

    py::class_<PenaltySpec>(m, "PenaltySpec",
                            "Size penalty scaling the fitted mse by log(n)/n or sqrt(n)/n.")
        .def(py::init<>())
        .def_readwrite("kind", &PenaltySpec::kind)
        .def_readwrite("multiplier", &PenaltySpec::multiplier);

    py::class_<SelectionRow>(m, "SelectionRow")
        .def_readonly("k", &SelectionRow::k)
        .def_readonly("mse", &SelectionRow::mse)
        .def_readonly("penalty", &SelectionRow::penalty)
        .def_readonly("score", &SelectionRow::score);

    py::class_<SelectionTrace>(m, "SelectionTrace")
        .def_readonly("per_k", &SelectionTrace::per_k)
        .def_readonly("chosen_k", &SelectionTrace::chosen_k);

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("trace", &SelectionResult::trace)
        .def_readonly("model", &SelectionResult::model)
        .def_readonly("mse", &SelectionResult::mse);

    m.def("penalty_value", &penalty_value, py::arg("spec"), py::arg("mse"), py::arg("n"));
    m.def("bic_score", &bic_score, py::arg("mse"), py::arg("parameter_count"), py::arg("n"));
    m.def("select_hidden_units",
          [](const std::vector<std::vector<double>>& inputs, const std::vector<double>& targets,
             std::size_t max_k, const PenaltySpec& penalty, const TrainConfig& config,
             std::uint64_t seed) {
              return select_hidden_units(make_pairs(inputs, targets), max_k, penalty, config,
                                         seed);
          },
          py::arg("inputs"), py::arg("targets"), py::arg("max_k"),
          py::arg("penalty") = PenaltySpec{}, py::arg("config") = TrainConfig{},
          py::arg("seed") = 1,
          "Grow the hidden layer while the penalized score does not increase.");

    // ---- hybrid Markov-switching autoregression ----------------------------

    py::class_<HmmMlpParams>(m, "HmmMlpParams",
                             "Markov-switching autoregression: a hidden chain picks the active "
                             "regressor and noise scale at each step.")
        .def(py::init<>())
        .def_readwrite("state_count", &HmmMlpParams::state_count)
        .def_readwrite("order", &HmmMlpParams::order)
        .def_readwrite("transition", &HmmMlpParams::transition)
        .def_readwrite("initial", &HmmMlpParams::initial)
        .def_readwrite("regressors", &HmmMlpParams::regressors)
        .def_readwrite("noise_scales", &HmmMlpParams::noise_scales)
        .def("validate", &HmmMlpParams::validate);

    py::class_<SimulatedSeries>(m, "SimulatedSeries")
        .def_readonly("values", &SimulatedSeries::values)
        .def_readonly("states", &SimulatedSeries::states);

    py::class_<GemConfig>(m, "GemConfig")
        .def(py::init<>())
        .def_readwrite("iterations", &GemConfig::iterations)
        .def_readwrite("hidden_count", &GemConfig::hidden_count)
        .def_readwrite("refine_iterations", &GemConfig::refine_iterations)
        .def_readwrite("sigma_floor", &GemConfig::sigma_floor)
        .def_readwrite("train", &GemConfig::train);

    py::class_<GemResult>(m, "GemResult")
        .def_readonly("params", &GemResult::params)
        .def_readonly("log_likelihood_trace", &GemResult::log_likelihood_trace)
        .def_readonly("warnings", &GemResult::warnings);

    m.def("simulate",
          [](const HmmMlpParams& params, std::size_t length, const std::vector<double>& warm,
             std::uint64_t seed) { return simulate(params, length, warm, seed); },
          py::arg("params"), py::arg("length"), py::arg("warm_start"), py::arg("seed"),
          "Draw a hidden path and emit observations; deterministic given the seed.");
    m.def("forward_log_likelihood",
          [](const HmmMlpParams& params, const std::vector<double>& series,
             const std::vector<double>& warm) {
              return forward_log_likelihood(params, series, warm);
          },
          py::arg("params"), py::arg("series"), py::arg("warm_start"));
    m.def("viterbi_decode",
          [](const HmmMlpParams& params, const std::vector<double>& series,
             const std::vector<double>& warm) { return viterbi_decode(params, series, warm); },
          py::arg("params"), py::arg("series"), py::arg("warm_start"));
    m.def("gem_fit",
          [](const std::vector<double>& series, std::size_t state_count, std::size_t order,
             const GemConfig& config, std::uint64_t seed) {
              return gem_fit(series, state_count, order, config, seed);
          },
          py::arg("series"), py::arg("state_count"), py::arg("order"),
          py::arg("config") = GemConfig{}, py::arg("seed") = 1,
          "Generalized EM fit with exact posteriors and bounded regressor refits.");

    // ---- self-organizing maps ----------------------------------------------

    py::enum_<LatticeShape>(m, "LatticeShape")
        .value("Grid", LatticeShape::Grid)
        .value("String", LatticeShape::String);

    py::enum_<LatticeMetric>(m, "LatticeMetric")
        .value("Euclidean", LatticeMetric::Euclidean)
        .value("Manhattan", LatticeMetric::Manhattan);

    py::class_<MapLattice>(m, "MapLattice", "Neurons at integer coordinates on a grid or string.")
        .def_static("grid", &MapLattice::grid, py::arg("rows"), py::arg("cols"),
                    py::arg("metric") = LatticeMetric::Euclidean)
        .def_static("string", &MapLattice::string, py::arg("length"),
                    py::arg("metric") = LatticeMetric::Euclidean)
        .def_property_readonly("shape", &MapLattice::shape)
        .def_property_readonly("rows", &MapLattice::rows)
        .def_property_readonly("cols", &MapLattice::cols)
        .def("neuron_count", &MapLattice::neuron_count)
        .def("coordinates", &MapLattice::coordinates, py::arg("neuron"))
        .def("distance", &MapLattice::distance, py::arg("c"), py::arg("d"))
        .def("are_neighbors", &MapLattice::are_neighbors, py::arg("c"), py::arg("d"));

    py::enum_<NeighborhoodKind>(m, "NeighborhoodKind")
        .value("Gaussian", NeighborhoodKind::Gaussian)
        .value("Window", NeighborhoodKind::Window);

    py::class_<NeighborhoodSchedule>(m, "NeighborhoodSchedule",
                                     "Radius interpolates linearly from the first to the last "
                                     "sweep.")
        .def(py::init<>())
        .def_readwrite("kind", &NeighborhoodSchedule::kind)
        .def_readwrite("initial_radius", &NeighborhoodSchedule::initial_radius)
        .def_readwrite("final_radius", &NeighborhoodSchedule::final_radius)
        .def_readwrite("sweep_count", &NeighborhoodSchedule::sweep_count)
        .def("validate", &NeighborhoodSchedule::validate)
        .def("radius_at", &NeighborhoodSchedule::radius_at, py::arg("sweep"));

    py::class_<BatchSomResult>(m, "BatchSomResult")
        .def_readonly("prototypes", &BatchSomResult::prototypes)
        .def_readonly("assignments", &BatchSomResult::assignments)
        .def_readonly("energy_trace", &BatchSomResult::energy_trace)
        .def_readonly("assignment_history", &BatchSomResult::assignment_history);

    py::class_<MapQuality>(m, "MapQuality")
        .def_readonly("quantization_error", &MapQuality::quantization_error)
        .def_readonly("topographic_error", &MapQuality::topographic_error);

    py::class_<SegmentedPrototype>(m, "SegmentedPrototype")
        .def_readonly("values", &SegmentedPrototype::values)
        .def_readonly("breakpoints", &SegmentedPrototype::breakpoints)
        .def_readonly("squared_error", &SegmentedPrototype::squared_error);

    m.def("neighbor_weight_table", &neighbor_weight_table, py::arg("schedule"),
          py::arg("lattice"), py::arg("sweep"));
    m.def("assign",
          [](const std::vector<double>& x, const Matrix& prototypes) {
              return assign(x, prototypes);
          },
          py::arg("x"), py::arg("prototypes"),
          "Index of the nearest prototype row; ties break low.");
    m.def("batch_som_train",
          [](const Matrix& data, const MapLattice& lattice, const NeighborhoodSchedule& schedule,
             std::uint64_t seed, const std::optional<Matrix>& initial_prototypes) {
              return batch_som_train(data, lattice, schedule, seed,
                                     initial_prototypes ? &*initial_prototypes : nullptr);
          },
          py::arg("data"), py::arg("lattice"), py::arg("schedule") = NeighborhoodSchedule{},
          py::arg("seed") = 1, py::arg("initial_prototypes") = std::nullopt,
          "Batch map training: alternate nearest-prototype assignment and "
          "neighborhood-weighted mean updates.");
    m.def("map_quality", &map_quality, py::arg("data"), py::arg("prototypes"), py::arg("lattice"),
          "Quantization error and topographic error of a trained map.");
    m.def("derivative_preprocess",
          [](const std::vector<double>& samples, const std::vector<double>& grid) {
              return derivative_preprocess(samples, grid);
          },
          py::arg("samples"), py::arg("grid"));
    m.def("segment_project_prototype",
          [](const std::vector<double>& samples, std::size_t segment_count) {
              return segment_project_prototype(samples, segment_count);
          },
          py::arg("samples"), py::arg("segment_count"),
          "Optimal piecewise-constant approximation by dynamic programming.");

    // ---- dissimilarity and kernel maps ---------------------------------------

    py::class_<DissimilarityMatrix>(m, "DissimilarityMatrix",
                                    "Validated pairwise dissimilarities: symmetric, zero "
                                    "diagonal, nonnegative.")
        .def_static("validated", &DissimilarityMatrix::validated, py::arg("d"))
        .def("size", &DissimilarityMatrix::size)
        .def("at", &DissimilarityMatrix::operator(), py::arg("i"), py::arg("j"))
        .def("values", &DissimilarityMatrix::values, py::return_value_policy::copy);

    py::class_<KernelMatrix>(m, "KernelMatrix",
                             "Validated Gram matrix: symmetric and positive semi-definite "
                             "within tolerance.")
        .def_static("validated", &KernelMatrix::validated, py::arg("k"),
                    py::arg("relative_tolerance") = 1e-8)
        .def("size", &KernelMatrix::size)
        .def("at", &KernelMatrix::operator(), py::arg("i"), py::arg("j"))
        .def("values", &KernelMatrix::values, py::return_value_policy::copy)
        .def("psd_tolerance", &KernelMatrix::psd_tolerance)
        .def("min_eigenvalue", &KernelMatrix::min_eigenvalue);

    py::class_<MedianMapState>(m, "MedianMapState")
        .def_readonly("prototype_indices", &MedianMapState::prototype_indices)
        .def_readonly("assignments", &MedianMapState::assignments)
        .def_readonly("distortion_trace", &MedianMapState::distortion_trace)
        .def_readonly("sweeps_run", &MedianMapState::sweeps_run)
        .def_readonly("warnings", &MedianMapState::warnings)
        .def_readonly("assignment_history", &MedianMapState::assignment_history)
        .def_readonly("prototype_history", &MedianMapState::prototype_history);

    py::class_<QMedianMapState>(m, "QMedianMapState")
        .def_readonly("prototype_sets", &QMedianMapState::prototype_sets)
        .def_readonly("assignments", &QMedianMapState::assignments)
        .def_readonly("distortion_trace", &QMedianMapState::distortion_trace)
        .def_readonly("sweeps_run", &QMedianMapState::sweeps_run)
        .def_readonly("warnings", &QMedianMapState::warnings);

    py::class_<KernelMapState>(m, "KernelMapState")
        .def_readonly("gamma", &KernelMapState::gamma)
        .def_readonly("assignments", &KernelMapState::assignments)
        .def_readonly("energy_trace", &KernelMapState::energy_trace)
        .def_readonly("assignment_history", &KernelMapState::assignment_history);

    m.def("local_distortion", &local_distortion, py::arg("d"), py::arg("assignments"),
          py::arg("neighbor_weights"), py::arg("neuron"), py::arg("candidate"),
          "Neighborhood-weighted distortion of one candidate prototype.");
    m.def("median_som_train",
          [](const DissimilarityMatrix& d, const MapLattice& lattice,
             const NeighborhoodSchedule& schedule, std::uint64_t seed, bool stop_on_fixed_point,
             const std::optional<std::vector<std::size_t>>& initial_prototypes) {
              return median_som_train(d, lattice, schedule, seed, stop_on_fixed_point,
                                      initial_prototypes ? &*initial_prototypes : nullptr);
          },
          py::arg("d"), py::arg("lattice"), py::arg("schedule") = NeighborhoodSchedule{},
          py::arg("seed") = 1, py::arg("stop_on_fixed_point") = true,
          py::arg("initial_prototypes") = std::nullopt,
          "Map training with prototypes constrained to observations.");
    m.def("q_median_som_train",
          [](const DissimilarityMatrix& d, const MapLattice& lattice,
             const NeighborhoodSchedule& schedule, std::size_t q, std::uint64_t seed,
             bool stop_on_fixed_point,
             const std::optional<std::vector<std::size_t>>& initial_prototypes) {
              return q_median_som_train(d, lattice, schedule, q, seed, stop_on_fixed_point,
                                        initial_prototypes ? &*initial_prototypes : nullptr);
          },
          py::arg("d"), py::arg("lattice"), py::arg("schedule") = NeighborhoodSchedule{},
          py::arg("q") = 1, py::arg("seed") = 1, py::arg("stop_on_fixed_point") = true,
          py::arg("initial_prototypes") = std::nullopt,
          "Median map with q prototypes per neuron.");
    m.def("kernel_som_train", &kernel_som_train, py::arg("k"), py::arg("lattice"),
          py::arg("schedule") = NeighborhoodSchedule{}, py::arg("seed") = 1,
          "Batch map training in the kernel feature space.");
    m.def("kernel_prototype_distance2",
          [](const KernelMatrix& k, const std::vector<double>& gamma_row, std::size_t j) {
              return kernel_prototype_distance2(k, gamma_row, j);
          },
          py::arg("k"), py::arg("gamma_row"), py::arg("j"));

    // ---- metrics and kernels -------------------------------------------------

    m.def("edit_distance",
          [](const std::string& s, const std::string& t) { return edit_distance(s, t); },
          py::arg("s"), py::arg("t"),
          "Minimum insertions, deletions and substitutions turning s into t.");
    m.def("rbf_kernel",
          [](const std::vector<double>& x, const std::vector<double>& y, double gamma) {
              return rbf_kernel(x, y, gamma);
          },
          py::arg("x"), py::arg("y"), py::arg("gamma"));
    m.def("poly_kernel",
          [](const std::vector<double>& x, const std::vector<double>& y, unsigned degree,
             double offset) { return poly_kernel(x, y, degree, offset); },
          py::arg("x"), py::arg("y"), py::arg("degree"), py::arg("offset"));
    m.def("linear_kernel",
          [](const std::vector<double>& x, const std::vector<double>& y) {
              return linear_kernel(x, y);
          },
          py::arg("x"), py::arg("y"));
    m.def("heat_kernel_matrix", &heat_kernel_matrix, py::arg("adjacency"), py::arg("beta"),
          "exp(-beta L) of the combinatorial graph Laplacian.");
    m.def("gram_matrix",
          [](const Matrix& data,
             const std::function<double(std::vector<double>, std::vector<double>)>& kernel) {
              return gram_matrix(data, [&kernel](std::span<const double> a,
                                                 std::span<const double> b) {
                  return kernel(std::vector<double>(a.begin(), a.end()),
                                std::vector<double>(b.begin(), b.end()));
              });
          },
          py::arg("data"), py::arg("kernel"),
          "Validated Gram matrix of a callable kernel over the data rows.");
    m.def("kernel_distance", &kernel_distance, py::arg("k"), py::arg("i"), py::arg("j"),
          "Kernel-induced distance sqrt(K_ii + K_jj - 2 K_ij).");

    // ---- categorical encodings ------------------------------------------------

    py::class_<CategoricalVariable>(m, "CategoricalVariable")
        .def(py::init<>())
        .def_readwrite("name", &CategoricalVariable::name)
        .def_readwrite("categories", &CategoricalVariable::categories);

    py::class_<CategoricalTable>(m, "CategoricalTable",
                                 "Individuals by categorical variables, each with a dictionary.")
        .def_static("inferred", &CategoricalTable::inferred, py::arg("variable_names"),
                    py::arg("rows"),
                    "Dictionaries inferred by first appearance down each column.")
        .def_static("with_dictionaries", &CategoricalTable::with_dictionaries,
                    py::arg("variables"), py::arg("rows"))
        .def("individual_count", &CategoricalTable::individual_count)
        .def("variable_count", &CategoricalTable::variable_count)
        .def("variables", &CategoricalTable::variables, py::return_value_policy::copy)
        .def("value", &CategoricalTable::value, py::arg("individual"), py::arg("variable"),
             py::return_value_policy::copy)
        .def("category_index", &CategoricalTable::category_index, py::arg("variable"),
             py::arg("label"))
        .def("total_category_count", &CategoricalTable::total_category_count);

    py::enum_<EncodingKind>(m, "EncodingKind")
        .value("Cdt", EncodingKind::Cdt)
        .value("Burt", EncodingKind::Burt);

    py::class_<ColumnCategory>(m, "ColumnCategory")
        .def_readonly("variable", &ColumnCategory::variable)
        .def_readonly("category", &ColumnCategory::category)
        .def_readonly("label", &ColumnCategory::label);

    py::class_<EncodedTable>(m, "EncodedTable")
        .def_readonly("kind", &EncodedTable::kind)
        .def_readonly("values", &EncodedTable::values)
        .def_readonly("columns", &EncodedTable::columns);

    py::class_<CaTransformResult>(m, "CaTransformResult")
        .def_readonly("values", &CaTransformResult::values)
        .def_readonly("kept_columns", &CaTransformResult::kept_columns)
        .def_readonly("warnings", &CaTransformResult::warnings);

    py::class_<CategoricalMapResult>(m, "CategoricalMapResult")
        .def_readonly("map", &CategoricalMapResult::map)
        .def_readonly("transformed", &CategoricalMapResult::transformed)
        .def_readonly("row_labels", &CategoricalMapResult::row_labels)
        .def_readonly("warnings", &CategoricalMapResult::warnings);

    m.def("disjunctive_table", &disjunctive_table, py::arg("table"),
          "One-hot coding, one row per individual.");
    m.def("burt_table", &burt_table, py::arg("table"),
          "Full category co-occurrence table, CDT^T * CDT.");
    m.def("ca_transform", &ca_transform, py::arg("encoded"),
          "Row scaling whose Euclidean distances equal chi-square distances.");
    m.def("categorical_som_train", &categorical_som_train, py::arg("table"), py::arg("kind"),
          py::arg("lattice"), py::arg("schedule") = NeighborhoodSchedule{}, py::arg("seed") = 1,
          "Encode, transform, and cluster individuals or categories on a map.");

    // ---- two-scale profiles and forecasting -----------------------------------

    py::class_<TwoScaleSeries>(m, "TwoScaleSeries",
                               "Slow steps of fast values with one metadata label per step.")
        .def(py::init<>())
        .def_readwrite("values", &TwoScaleSeries::values)
        .def_readwrite("metadata", &TwoScaleSeries::metadata)
        .def("validate", &TwoScaleSeries::validate);

    py::class_<ProfileDecomposition>(m, "ProfileDecomposition")
        .def_readonly("means", &ProfileDecomposition::means)
        .def_readonly("scales", &ProfileDecomposition::scales)
        .def_readonly("profiles", &ProfileDecomposition::profiles)
        .def_readonly("degenerate", &ProfileDecomposition::degenerate);

    py::class_<MetadataMap>(m, "MetadataMap")
        .def_readonly("counts", &MetadataMap::counts)
        .def("total", &MetadataMap::total)
        .def("label_count", &MetadataMap::label_count, py::arg("neuron"), py::arg("label"));

    py::class_<ProfileSomResult>(m, "ProfileSomResult")
        .def_readonly("map", &ProfileSomResult::map)
        .def_readonly("metadata", &ProfileSomResult::metadata)
        .def_readonly("trained_rows", &ProfileSomResult::trained_rows);

    py::class_<ForecastMethod> forecast_method(m, "ForecastMethod");
    py::enum_<ForecastMethod::Kind>(forecast_method, "Kind")
        .value("SeasonalNaive", ForecastMethod::Kind::SeasonalNaive)
        .value("Ar", ForecastMethod::Kind::Ar);
    forecast_method.def(py::init<>())
        .def_readwrite("kind", &ForecastMethod::kind)
        .def_readwrite("period", &ForecastMethod::period)
        .def_readwrite("order", &ForecastMethod::order);

    py::class_<ProfilePrediction>(m, "ProfilePrediction")
        .def_readonly("profile", &ProfilePrediction::profile)
        .def_readonly("fallback", &ProfilePrediction::fallback);

    py::class_<VectorForecast>(m, "VectorForecast")
        .def_readonly("values", &VectorForecast::values)
        .def_readonly("mean", &VectorForecast::mean)
        .def_readonly("scale", &VectorForecast::scale)
        .def_readonly("fallback", &VectorForecast::fallback);

    m.def("decompose_profiles", &decompose_profiles, py::arg("series"),
          "Per-row standardization into mean, scale and a unit profile.");
    m.def("train_profile_som", &train_profile_som, py::arg("decomposition"), py::arg("metadata"),
          py::arg("lattice"), py::arg("schedule") = NeighborhoodSchedule{}, py::arg("seed") = 1,
          "Cluster the non-degenerate profiles and attach label multisets.");
    m.def("forecast_mean_var",
          [](const std::vector<double>& means, const std::vector<double>& scales,
             const ForecastMethod& method) { return forecast_mean_var(means, scales, method); },
          py::arg("means"), py::arg("scales"), py::arg("method"),
          "One-step forecast of the slow-scale mean and scale histories.");
    m.def("predict_profile", &predict_profile, py::arg("label"), py::arg("prototypes"),
          py::arg("metadata"),
          "Count-weighted prototype average for a metadata label.");
    m.def("forecast_next_vector", &forecast_next_vector, py::arg("series"),
          py::arg("next_label"), py::arg("lattice"),
          py::arg("schedule") = NeighborhoodSchedule{}, py::arg("method") = ForecastMethod{},
          py::arg("seed") = 1,
          "Decompose, cluster, forecast mean and scale, and recompose the next vector.");
}
