#pragma once

#include <cstddef>
#include <vector>

namespace csign {

/// Principal components of a data matrix via cyclic Jacobi rotations on the
/// column-centered sample covariance (divide by rows-1).
struct PcaResult {
    std::vector<std::vector<double>> components;  // components[i]: i-th eigenvector
    std::vector<double> eigenvalues;              // descending
};

/// rows >= 2, n_components <= cols. Components are orthonormal within 1e-9;
/// sign convention: the largest-magnitude loading of each component is
/// positive. A rank-0 matrix yields all-zero eigenvalues and identity
/// components.
PcaResult pca(const std::vector<std::vector<double>>& matrix, std::size_t n_components);

/// The symmetric eigen-solver underneath pca(), exposed for reuse:
/// a = V diag(lambda) V^T with V's columns as eigenvectors.
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double>& eigenvalues,
                  std::vector<std::vector<double>>& eigenvectors);

std::vector<std::vector<double>> covariance_matrix(const std::vector<std::vector<double>>& matrix);

}  // namespace csign
