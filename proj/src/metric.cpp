#include "ncd/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace ncd {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

Matrix from_eigen(const Eigen::MatrixXd& m) {
    Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = m(i, j);
    return out;
}

} // namespace

std::string DissimilarityReport::describe() const {
    if (ok()) return "ok";
    std::string msg;
    for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += v.rule + " violation at (" + std::to_string(v.i) + ", " + std::to_string(v.j) +
               "), value " + std::to_string(v.value);
    }
    return msg;
}

DissimilarityReport validate_dissimilarity(const Matrix& d) {
    if (d.rows() != d.cols()) throw InvalidInput("validate_dissimilarity: matrix is not square");
    DissimilarityReport report;
    const std::size_t n = d.rows();

    bool asymmetric = false;
    for (std::size_t i = 0; i < n && !asymmetric; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(d(i, j) - d(j, i)) > kSymmetryTolerance) {
                report.violations.push_back({"symmetry", i, j, d(i, j) - d(j, i)});
                asymmetric = true;
                break;
            }
    for (std::size_t i = 0; i < n; ++i)
        if (d(i, i) != 0.0) {
            report.violations.push_back({"diagonal", i, i, d(i, i)});
            break;
        }
    for (std::size_t i = 0; i < n; ++i) {
        bool found = false;
        for (std::size_t j = 0; j < n; ++j)
            if (d(i, j) < 0.0) {
                report.violations.push_back({"nonnegativity", i, j, d(i, j)});
                found = true;
                break;
            }
        if (found) break;
    }
    return report;
}

DissimilarityMatrix DissimilarityMatrix::validated(Matrix d) {
    const DissimilarityReport report = validate_dissimilarity(d);
    if (!report.ok()) throw InvalidInput("dissimilarity matrix rejected: " + report.describe());
    DissimilarityMatrix out;
    out.d_ = std::move(d);
    return out;
}

KernelMatrix KernelMatrix::validated(Matrix k, double relative_tolerance) {
    if (k.rows() != k.cols()) throw InvalidInput("KernelMatrix: matrix is not square");
    const std::size_t n = k.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(k(i, j) - k(j, i)) > kSymmetryTolerance)
                throw InvalidInput("KernelMatrix: symmetry violation at (" + std::to_string(i) +
                                   ", " + std::to_string(j) + ")");

    KernelMatrix out;
    if (n > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(k),
                                                              Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        const double spectral_norm = solver.eigenvalues().cwiseAbs().maxCoeff();
        out.psd_tolerance_ = relative_tolerance * spectral_norm;
        out.min_eigenvalue_ = min_eig;
        if (min_eig < -out.psd_tolerance_)
            throw NonPositiveKernel("kernel matrix is not positive semi-definite: minimum "
                                    "eigenvalue " + std::to_string(min_eig),
                                    min_eig);
    }
    out.k_ = std::move(k);
    return out;
}

std::size_t edit_distance(std::string_view s, std::string_view t) {
    const std::size_t m = s.size();
    const std::size_t n = t.size();
    std::vector<std::size_t> prev(n + 1), curr(n + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= m; ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t subst = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, subst});
        }
        std::swap(prev, curr);
    }
    return prev[n];
}

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (gamma <= 0.0) throw InvalidInput("rbf_kernel: gamma must be positive");
    return std::exp(-gamma * squared_distance(x, y));
}

double poly_kernel(std::span<const double> x, std::span<const double> y, unsigned degree,
                   double offset) {
    if (x.size() != y.size()) throw InvalidInput("poly_kernel: dimension mismatch");
    if (degree == 0) throw InvalidInput("poly_kernel: degree must be >= 1");
    double dot = offset;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return std::pow(dot, static_cast<double>(degree));
}

double linear_kernel(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidInput("linear_kernel: dimension mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    return dot;
}

KernelMatrix heat_kernel_matrix(const Matrix& adjacency, double beta) {
    if (adjacency.rows() != adjacency.cols())
        throw InvalidInput("heat_kernel_matrix: adjacency matrix is not square");
    if (beta < 0.0) throw InvalidInput("heat_kernel_matrix: beta must be nonnegative");
    const std::size_t n = adjacency.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency(i, i) != 0.0)
            throw InvalidInput("heat_kernel_matrix: adjacency diagonal must be zero (node " +
                               std::to_string(i) + ")");
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency(i, j) != adjacency(j, i))
                throw InvalidInput("heat_kernel_matrix: adjacency is asymmetric at (" +
                                   std::to_string(i) + ", " + std::to_string(j) + ")");
            if (adjacency(i, j) != 0.0 && adjacency(i, j) != 1.0)
                throw InvalidInput("heat_kernel_matrix: adjacency entries must be 0 or 1");
        }
    }

    Eigen::MatrixXd laplacian = -to_eigen(adjacency);
    for (std::size_t i = 0; i < n; ++i) {
        double degree = 0.0;
        for (std::size_t j = 0; j < n; ++j) degree += adjacency(i, j);
        laplacian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = degree;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    const Eigen::VectorXd decayed = (-beta * solver.eigenvalues().array()).exp();
    Eigen::MatrixXd k = solver.eigenvectors() * decayed.asDiagonal() *
                        solver.eigenvectors().transpose();
    k = 0.5 * (k + k.transpose().eval()); // exact symmetry for validation
    return KernelMatrix::validated(from_eigen(k));
}

KernelMatrix gram_matrix(const Matrix& data, const VectorKernel& kernel) {
    if (!kernel) throw InvalidInput("gram_matrix: no kernel supplied");
    if (data.rows() == 0) throw InvalidInput("gram_matrix: empty data");
    const std::size_t n = data.rows();
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel(data.row(i), data.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    return KernelMatrix::validated(std::move(k));
}

double kernel_distance(const KernelMatrix& k, std::size_t i, std::size_t j) {
    if (i >= k.size() || j >= k.size())
        throw InvalidInput("kernel_distance: index out of range");
    const double radicand = k(i, i) + k(j, j) - 2.0 * k(i, j);
    if (radicand < -1e-10)
        throw NonPositiveKernel("kernel_distance: negative squared distance " +
                                std::to_string(radicand),
                                radicand);
    return std::sqrt(std::max(0.0, radicand));
}

} // namespace ncd
