#include "biphoton/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "biphoton/error.hpp"

namespace biphoton {

double entropy_bits(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double lambda : eigenvalues) {
        if (lambda < -negative_lambda_tolerance)
            throw NumericalError(fmt::format("negative Schmidt eigenvalue {:.3e}", lambda));
        if (lambda < lambda_floor) continue;
        s -= lambda * std::log2(lambda);
    }
    // a pure state can come out as -0.0 or a few ulps below zero
    return s > 0.0 ? s : 0.0;
}

std::string run_digest(const MultiplexConfig& config, const FrequencyGrid& grid) {
    const auto& g = grid.spec();
    return fmt::format("{}-{}x{}-{}", config.digest(), g.n_s, g.n_i, to_string(g.scheme));
}

EntropyResult entropy_of_entanglement(const SchmidtSpectrum& spectrum, const MultiplexConfig& config) {
    EntropyResult r;
    r.S = entropy_bits(spectrum.eigenvalues);
    double retained = 0.0;
    for (std::size_t n = 0; n < spectrum.retained_count(); ++n) retained += spectrum.eigenvalues[n];
    r.lambda_tail = std::clamp(1.0 - retained, 0.0, 1.0);
    r.config_digest = run_digest(config, spectrum.grid);
    return r;
}

double entropy_for(const MultiplexConfig& config, const FrequencyGrid& grid) {
    return entropy_bits(schmidt_eigenvalues(build_kernel(config, grid)));
}

double qudit_entropy(int n_mp) {
    if (n_mp < 1) throw ValidationError(fmt::format("qudit dimension must be >= 1, got {}", n_mp));
    return std::log2(static_cast<double>(n_mp));
}

AdditivityResult additivity_check(const MultiplexConfig& config, const FrequencyGrid& grid) {
    if (config.size() < 2) throw ValidationError("additivity check needs at least two ensembles");
    for (const auto& e : config.ensembles())
        if (e.delta_q() != 0.0) throw ValidationError("additivity check requires delta_q = 0 on every ensemble");
    const MultiplexConfig single({EnsembleShift(0.0, 0.0, 0.0)}, config.gamma3N(), config.tau());
    AdditivityResult r;
    r.S_multi = entropy_for(config, grid);
    r.S_single = entropy_for(single, grid);
    r.S_d = qudit_entropy(static_cast<int>(config.size()));
    r.deviation = r.S_multi - (r.S_d + r.S_single);
    return r;
}

} // namespace biphoton
