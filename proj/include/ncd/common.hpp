#ifndef NCD_COMMON_HPP
#define NCD_COMMON_HPP

#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncd {

/// Rejected input: dimension mismatches, invariant violations, malformed files.
/// Maps to CLI exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numeric failure during computation: divergence, degenerate densities,
/// positivity violations. Maps to CLI exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every optimizer restart produced a non-finite loss.
class TrainingDiverged : public NumericError {
public:
    TrainingDiverged(const std::string& message, std::vector<int> restarts)
        : NumericError(message), diverged_restarts_(std::move(restarts)) {}

    const std::vector<int>& diverged_restarts() const { return diverged_restarts_; }

private:
    std::vector<int> diverged_restarts_;
};

/// A kernel matrix failed its positive semi-definiteness check.
class NonPositiveKernel : public NumericError {
public:
    NonPositiveKernel(const std::string& message, double offending_value)
        : NumericError(message), offending_value_(offending_value) {}

    double offending_value() const { return offending_value_; }

private:
    double offending_value_ = 0.0;
};

/// Dense row-major matrix of doubles. Small and value-semantic; all the
/// pairwise structures in this library (dissimilarities, kernels, encoded
/// tables, prototype sets) fit comfortably in memory.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Deterministic 64-bit generator (splitmix64). Hand-rolled so that seeded
/// runs are reproducible across platforms and standard library versions;
/// std:: distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform01();

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller.
    double normal();

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t uniform_index(std::size_t n);

    /// k distinct indices drawn from [0, n) by partial Fisher-Yates.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

/// Stable seed derivation for independent streams (restarts, per-k runs).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// log(sum_i exp(x_i)); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

double squared_distance(std::span<const double> a, std::span<const double> b);

} // namespace ncd

#endif
