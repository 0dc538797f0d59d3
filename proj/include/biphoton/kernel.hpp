#pragma once

#include <complex>

#include <Eigen/Core>

#include "biphoton/config.hpp"
#include "biphoton/grid.hpp"

namespace biphoton {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;

/// Multiplexed joint spectral amplitude at (signal, idler) detuning, unnormalized:
///
///   f(ws, wi) = sum_m exp(i theta_m) exp(-(ws + wi + dq_m)^2 tau^2 / 8) / (gamma3N/2 - i (wi + dp_m))
///
/// Terms are summed in ensemble order.
cplx eval_spectral_amplitude(const MultiplexConfig& config, double dws, double dwi);

/// Quadrature-weighted, unit-Frobenius-norm matrix of the amplitude on a grid.
/// Rows index signal nodes, columns idler nodes:
///   K(j, k) = sqrt(w_s[j]) f(s_j, i_k) sqrt(w_i[k]) / norm_constant
class DiscretizedKernel {
public:
    DiscretizedKernel(ComplexMatrix matrix, double norm_constant, FrequencyGrid grid,
                      MultiplexConfig config);

    const ComplexMatrix& matrix() const noexcept { return matrix_; }
    double norm_constant() const noexcept { return norm_constant_; }
    const FrequencyGrid& grid() const noexcept { return grid_; }
    const MultiplexConfig& config() const noexcept { return config_; }

private:
    ComplexMatrix matrix_;
    double norm_constant_;
    FrequencyGrid grid_;
    MultiplexConfig config_;
};

/// Relative floor below which the pre-normalization norm counts as an empty state.
inline constexpr double null_kernel_tolerance = 1e-10;

/// Evaluates, weights and normalizes. Throws NullKernelError when the weighted
/// Frobenius norm falls below null_kernel_tolerance * (largest single-term
/// magnitude on the grid) * sqrt(area of the window).
DiscretizedKernel build_kernel(const MultiplexConfig& config, const FrequencyGrid& grid);

/// Weighted matrix before normalization; used by tests and by build_kernel.
ComplexMatrix weighted_amplitude(const MultiplexConfig& config, const FrequencyGrid& grid);

} // namespace biphoton
