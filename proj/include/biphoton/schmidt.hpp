#pragma once

#include <cstddef>
#include <vector>

#include "biphoton/kernel.hpp"

namespace biphoton {

/// Eigenvalues and mode functions of a discretized biphoton amplitude.
struct SchmidtSpectrum {
    /// All lambda_n, descending, summing to 1 (not only the retained ones).
    std::vector<double> eigenvalues;
    /// Column n is psi_n sampled on the signal nodes.
    ComplexMatrix signal_modes;
    /// Column n is phi_n sampled on the idler nodes.
    ComplexMatrix idler_modes;
    FrequencyGrid grid;

    std::size_t retained_count() const noexcept { return static_cast<std::size_t>(signal_modes.cols()); }
};

inline constexpr std::size_t default_retained_count = 64;

/// Full SVD of the kernel. lambda_n = sigma_n^2 / sum sigma^2. Mode samples are the
/// singular vectors divided by sqrt(weight), so they are orthonormal under the grid
/// quadrature. Phase gauge: the largest-magnitude sample of each psi_n is real
/// positive and phi_n carries the compensating phase, so that
/// f = sum_n sqrt(lambda_n) psi_n(ws) phi_n(wi).
SchmidtSpectrum schmidt_decompose(const DiscretizedKernel& kernel,
                                  std::size_t retained_count = default_retained_count);

/// Eigenvalues only. When the configuration has a common joint shift the singular
/// values are taken from the real magnitude matrix |K|, which has the same spectrum.
std::vector<double> schmidt_eigenvalues(const DiscretizedKernel& kernel);

/// Independent check: eigenvalues of rho_s = K K^dagger from a dense Hermitian
/// eigensolver, sorted descending. Not normalized; small negative round-off is kept.
std::vector<double> oracle_reduced_density(const DiscretizedKernel& kernel);
std::vector<double> oracle_reduced_density(const ComplexMatrix& kernel);

/// Singular values of an arbitrary complex matrix, descending (LAPACK gesdd).
std::vector<double> singular_values(const ComplexMatrix& m);

struct ModeDensity {
    std::vector<double> signal;
    std::vector<double> idler;
};

/// |psi_n|^2 and |phi_n|^2 on the grid nodes. `n` is 1-based.
ModeDensity mode_density(const SchmidtSpectrum& spectrum, std::size_t n);

struct DegeneracyReport {
    /// 1-based eigenvalue indices, consecutive within each group.
    std::vector<std::vector<std::size_t>> groups;
    double rel_tol = 0.0;
};

/// Groups consecutive eigenvalues n, n+1 while (lambda_n - lambda_{n+1}) / lambda_n < rel_tol,
/// over the first K eigenvalues.
DegeneracyReport detect_degeneracy(const std::vector<double>& eigenvalues, double rel_tol, std::size_t K);
DegeneracyReport detect_degeneracy(const SchmidtSpectrum& spectrum, double rel_tol, std::size_t K);

/// Number of strict local maxima whose topographic prominence is at least
/// `rel_prominence` times the global maximum.
std::size_t count_peaks(const std::vector<double>& samples, double rel_prominence = 0.01);

} // namespace biphoton
