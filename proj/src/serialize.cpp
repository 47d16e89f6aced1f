#include "ncd/serialize.hpp"

namespace ncd {

namespace {

const Json& require_key(const Json& j, const std::string& key, const std::string& context) {
    const auto it = j.find(key);
    if (it == j.end()) throw InvalidInput(context + ": missing key '" + key + "'");
    return *it;
}

void check_version(const Json& j, const std::string& context) {
    const Json& v = require_key(j, "formatVersion", context);
    if (!v.is_number_integer() || v.get<int>() != kFormatVersion)
        throw InvalidInput(context + ": unsupported formatVersion " + v.dump());
}

Transfer transfer_from_name(const std::string& name, const std::string& context) {
    if (name == "tanh") return Transfer::Tanh;
    if (name == "logistic") return Transfer::Logistic;
    throw InvalidInput(context + ": unknown transfer '" + name + "'");
}

std::string transfer_name(Transfer t) { return t == Transfer::Tanh ? "tanh" : "logistic"; }

template <typename T>
T typed(const Json& j, const std::string& key, const std::string& context) {
    try {
        return require_key(j, key, context).get<T>();
    } catch (const Json::exception& e) {
        throw InvalidInput(context + ": bad value for '" + key + "': " + e.what());
    }
}

} // namespace

Json matrix_to_json(const Matrix& values) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < values.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < values.cols(); ++j) row.push_back(values(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw InvalidInput("matrix: expected an array of rows");
    std::vector<std::vector<double>> rows;
    rows.reserve(j.size());
    try {
        for (const Json& row : j) rows.push_back(row.get<std::vector<double>>());
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("matrix: bad row: ") + e.what());
    }
    for (const auto& row : rows)
        if (row.size() != rows.front().size())
            throw InvalidInput("matrix: ragged rows in JSON input");
    return Matrix::from_rows(rows);
}

Json mlp_to_json(const MlpParams& params) {
    Json j;
    j["formatVersion"] = kFormatVersion;
    j["type"] = "mlp";
    j["inputDim"] = params.input_dim;
    j["transfer"] = transfer_name(params.transfer);
    j["hiddenWeights"] = params.hidden_weights;
    j["hiddenBiases"] = params.hidden_biases;
    j["outputWeights"] = params.output_weights;
    j["intercept"] = params.intercept;
    return j;
}

MlpParams mlp_from_json(const Json& j) {
    const std::string context = "mlp model";
    check_version(j, context);
    MlpParams params;
    params.input_dim = typed<std::size_t>(j, "inputDim", context);
    params.transfer = transfer_from_name(typed<std::string>(j, "transfer", context), context);
    params.hidden_weights = typed<std::vector<std::vector<double>>>(j, "hiddenWeights", context);
    params.hidden_biases = typed<std::vector<double>>(j, "hiddenBiases", context);
    params.output_weights = typed<std::vector<double>>(j, "outputWeights", context);
    params.intercept = typed<double>(j, "intercept", context);
    params.validate();
    return params;
}

Json hmm_to_json(const HmmMlpParams& params) {
    Json j;
    j["formatVersion"] = kFormatVersion;
    j["type"] = "hmm-mlp";
    j["stateCount"] = params.state_count;
    j["order"] = params.order;
    j["transition"] = matrix_to_json(params.transition);
    j["initial"] = params.initial;
    j["noiseScales"] = params.noise_scales;
    Json regressors = Json::array();
    for (const auto& regressor : params.regressors) regressors.push_back(mlp_to_json(regressor));
    j["regressors"] = std::move(regressors);
    return j;
}

HmmMlpParams hmm_from_json(const Json& j) {
    const std::string context = "hybrid model";
    check_version(j, context);
    HmmMlpParams params;
    params.state_count = typed<std::size_t>(j, "stateCount", context);
    params.order = typed<std::size_t>(j, "order", context);
    params.transition = matrix_from_json(require_key(j, "transition", context));
    params.initial = typed<std::vector<double>>(j, "initial", context);
    params.noise_scales = typed<std::vector<double>>(j, "noiseScales", context);
    const Json& regressors = require_key(j, "regressors", context);
    if (!regressors.is_array()) throw InvalidInput(context + ": 'regressors' must be an array");
    for (const Json& r : regressors) params.regressors.push_back(mlp_from_json(r));
    params.validate();
    return params;
}

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidInput(origin + ": invalid JSON: " + e.what());
    }
}

std::string dump_artifact(const Json& j) { return j.dump(2) + "\n"; }

} // namespace ncd
