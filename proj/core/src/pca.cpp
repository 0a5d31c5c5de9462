#include "countersign/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csign {

std::vector<std::vector<double>> covariance_matrix(const std::vector<std::vector<double>>& matrix) {
    const std::size_t rows = matrix.size();
    if (rows < 2) throw std::invalid_argument("covariance: need at least 2 rows");
    const std::size_t cols = matrix[0].size();

    std::vector<double> means(cols, 0.0);
    for (const auto& row : matrix) {
        for (std::size_t c = 0; c < cols; ++c) means[c] += row[c];
    }
    for (auto& m : means) m /= static_cast<double>(rows);

    std::vector<std::vector<double>> cov(cols, std::vector<double>(cols, 0.0));
    for (const auto& row : matrix) {
        for (std::size_t a = 0; a < cols; ++a) {
            const double da = row[a] - means[a];
            for (std::size_t b = a; b < cols; ++b) {
                cov[a][b] += da * (row[b] - means[b]);
            }
        }
    }
    const double denom = static_cast<double>(rows - 1);
    for (std::size_t a = 0; a < cols; ++a) {
        for (std::size_t b = a; b < cols; ++b) {
            cov[a][b] /= denom;
            cov[b][a] = cov[a][b];
        }
    }
    return cov;
}

void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors) {
    const std::size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-24) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-30) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = eigenvectors[i][p];
                    const double viq = eigenvectors[i][q];
                    eigenvectors[i][p] = c * vip - s * viq;
                    eigenvectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

PcaResult pca(const std::vector<std::vector<double>>& matrix, std::size_t n_components) {
    if (matrix.size() < 2) throw std::invalid_argument("pca: need at least 2 rows");
    const std::size_t cols = matrix[0].size();
    if (n_components > cols) throw std::invalid_argument("pca: n_components > cols");

    const auto cov = covariance_matrix(matrix);
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> vectors;  // column-major eigenvectors
    jacobi_eigen(cov, eigenvalues, vectors);

    // Sort eigenpairs descending; stable so ties keep matrix order.
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return eigenvalues[a] > eigenvalues[b]; });

    PcaResult result;
    result.eigenvalues.reserve(n_components);
    result.components.reserve(n_components);
    for (std::size_t k = 0; k < n_components; ++k) {
        const std::size_t col = order[k];
        result.eigenvalues.push_back(eigenvalues[col]);
        std::vector<double> component(cols);
        for (std::size_t i = 0; i < cols; ++i) component[i] = vectors[i][col];

        // Sign convention: largest-magnitude loading positive.
        std::size_t arg = 0;
        for (std::size_t i = 1; i < cols; ++i) {
            if (std::abs(component[i]) > std::abs(component[arg])) arg = i;
        }
        if (component[arg] < 0) {
            for (auto& v : component) v = -v;
        }
        result.components.push_back(std::move(component));
    }
    return result;
}

}  // namespace csign
