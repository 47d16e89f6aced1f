#ifndef NCD_METRIC_HPP
#define NCD_METRIC_HPP

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncd/common.hpp"

namespace ncd {

struct DissimilarityViolation {
    std::string rule; // "symmetry", "diagonal", "nonnegativity"
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

struct DissimilarityReport {
    std::vector<DissimilarityViolation> violations; // first offending pair per rule
    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

/// Checks the dissimilarity axioms: symmetry (within 1e-12), zero diagonal,
/// nonnegative entries. The triangle inequality is deliberately not required.
DissimilarityReport validate_dissimilarity(const Matrix& d);

/// Validated pairwise dissimilarities.
class DissimilarityMatrix {
public:
    static DissimilarityMatrix validated(Matrix d);

    std::size_t size() const { return d_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return d_(i, j); }
    const Matrix& values() const { return d_; }

private:
    Matrix d_;
};

/// Validated kernel (Gram) matrix: symmetric, and positive semi-definite up
/// to psd_tolerance = relative_tolerance * spectral norm.
class KernelMatrix {
public:
    static KernelMatrix validated(Matrix k, double relative_tolerance = 1e-8);

    std::size_t size() const { return k_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return k_(i, j); }
    const Matrix& values() const { return k_; }
    double psd_tolerance() const { return psd_tolerance_; }
    double min_eigenvalue() const { return min_eigenvalue_; }

private:
    Matrix k_;
    double psd_tolerance_ = 0.0;
    double min_eigenvalue_ = 0.0;
};

/// Minimum number of single-symbol insertions, deletions and substitutions
/// turning s into t (unit costs).
std::size_t edit_distance(std::string_view s, std::string_view t);

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);
double poly_kernel(std::span<const double> x, std::span<const double> y, unsigned degree,
                   double offset);
double linear_kernel(std::span<const double> x, std::span<const double> y);

/// Heat kernel exp(-beta * L) of the combinatorial Laplacian L = D - A,
/// computed by symmetric eigendecomposition. Adjacency must be symmetric 0/1
/// with a zero diagonal; beta >= 0.
KernelMatrix heat_kernel_matrix(const Matrix& adjacency, double beta);

using VectorKernel = std::function<double(std::span<const double>, std::span<const double>)>;

/// Gram matrix K[i][j] = kernel(row_i, row_j) over the rows of data,
/// validated for symmetry and positive semi-definiteness.
KernelMatrix gram_matrix(const Matrix& data, const VectorKernel& kernel);

/// Kernel-induced distance sqrt(K_ii + K_jj - 2 K_ij). A radicand in
/// [-1e-10, 0) clamps to zero; anything lower raises NonPositiveKernel.
double kernel_distance(const KernelMatrix& k, std::size_t i, std::size_t j);

} // namespace ncd

#endif
