#pragma once

#include <span>
#include <string>

#include "biphoton/schmidt.hpp"

namespace biphoton {

struct EntropyResult {
    double S = 0.0;           ///< bits
    double lambda_tail = 0.0; ///< 1 - sum of retained eigenvalues
    std::string config_digest;
};

/// Eigenvalues below this count as exact zeros in -lambda log2 lambda.
inline constexpr double lambda_floor = 1e-30;
/// Eigenvalues below minus this are treated as a numerical failure, not clamped.
inline constexpr double negative_lambda_tolerance = 1e-12;

/// -sum lambda log2 lambda over every entry. Throws NumericalError on a clearly negative entry.
double entropy_bits(std::span<const double> eigenvalues);

EntropyResult entropy_of_entanglement(const SchmidtSpectrum& spectrum, const MultiplexConfig& config);

/// Entropy of the post-selected state of `config` on `grid`, from eigenvalues only.
double entropy_for(const MultiplexConfig& config, const FrequencyGrid& grid);

/// log2 of the number of multiplexed ensembles.
double qudit_entropy(int n_mp);

struct AdditivityResult {
    double S_multi = 0.0;
    double S_single = 0.0;
    double S_d = 0.0;
    /// S_multi - (S_d + S_single)
    double deviation = 0.0;
};

/// Compares the multiplexed entropy with log2(N) plus the entropy of one
/// unshifted ensemble with the same gamma3N and tau.
AdditivityResult additivity_check(const MultiplexConfig& config, const FrequencyGrid& grid);

/// Identifier combining the configuration and grid.
std::string run_digest(const MultiplexConfig& config, const FrequencyGrid& grid);

} // namespace biphoton
