#include "biphoton/kernel.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

struct Term {
    cplx phase;
    double delta_p;
    double delta_q;
};

std::vector<Term> terms_of(const MultiplexConfig& config) {
    std::vector<Term> terms;
    terms.reserve(config.size());
    for (const auto& e : config.ensembles())
        terms.push_back({std::polar(1.0, e.theta()), e.delta_p(), e.delta_q()});
    return terms;
}

// Weighted amplitude plus the largest unweighted single-term magnitude seen.
std::pair<ComplexMatrix, double> evaluate(const MultiplexConfig& config, const FrequencyGrid& grid) {
    config.validate();
    const auto& s = grid.signal();
    const auto& idl = grid.idler();
    const auto terms = terms_of(config);
    const double half_width = 0.5 * config.gamma3N();
    const double gauss_scale = config.tau() * config.tau() / 8.0;

    const auto ns = static_cast<Eigen::Index>(s.nodes.size());
    const auto ni = static_cast<Eigen::Index>(idl.nodes.size());
    std::vector<double> sqrt_ws(ns);
    for (Eigen::Index j = 0; j < ns; ++j) sqrt_ws[j] = std::sqrt(s.weights[j]);

    ComplexMatrix k_mat(ns, ni);
    std::vector<cplx> column_factor(terms.size());
    std::vector<double> lorentz_mag(terms.size());
    double max_term = 0.0;
    for (Eigen::Index k = 0; k < ni; ++k) {
        const double wi = idl.nodes[k];
        const double sqrt_wi = std::sqrt(idl.weights[k]);
        for (std::size_t m = 0; m < terms.size(); ++m) {
            const cplx lorentz = 1.0 / cplx(half_width, -(wi + terms[m].delta_p));
            column_factor[m] = terms[m].phase * lorentz;
            lorentz_mag[m] = std::abs(lorentz);
        }
        for (Eigen::Index j = 0; j < ns; ++j) {
            cplx acc{0.0, 0.0};
            for (std::size_t m = 0; m < terms.size(); ++m) {
                const double x = s.nodes[j] + wi + terms[m].delta_q;
                const double g = std::exp(-x * x * gauss_scale);
                acc += g * column_factor[m];
                max_term = std::max(max_term, g * lorentz_mag[m]);
            }
            k_mat(j, k) = sqrt_ws[j] * acc * sqrt_wi;
        }
    }
    return {std::move(k_mat), max_term};
}

} // namespace

cplx eval_spectral_amplitude(const MultiplexConfig& config, double dws, double dwi) {
    const double half_width = 0.5 * config.gamma3N();
    const double gauss_scale = config.tau() * config.tau() / 8.0;
    cplx acc{0.0, 0.0};
    for (const auto& e : config.ensembles()) {
        const double x = dws + dwi + e.delta_q();
        acc += std::polar(1.0, e.theta()) * std::exp(-x * x * gauss_scale) /
               cplx(half_width, -(dwi + e.delta_p()));
    }
    return acc;
}

DiscretizedKernel::DiscretizedKernel(ComplexMatrix matrix, double norm_constant, FrequencyGrid grid,
                                     MultiplexConfig config)
    : matrix_(std::move(matrix)), norm_constant_(norm_constant), grid_(std::move(grid)),
      config_(std::move(config)) {}

ComplexMatrix weighted_amplitude(const MultiplexConfig& config, const FrequencyGrid& grid) {
    return evaluate(config, grid).first;
}

DiscretizedKernel build_kernel(const MultiplexConfig& config, const FrequencyGrid& grid) {
    auto [k_mat, max_term] = evaluate(config, grid);
    const double norm = k_mat.norm();
    const auto& sw = grid.signal().weights;
    const auto& iw = grid.idler().weights;
    const double area = std::accumulate(sw.begin(), sw.end(), 0.0) * std::accumulate(iw.begin(), iw.end(), 0.0);
    const double scale = max_term * std::sqrt(area);
    if (!(norm >= null_kernel_tolerance * scale))
        throw NullKernelError(fmt::format(
            "spectral function vanishes on the grid (norm {:.3e} below {:.1e} x scale {:.3e})", norm,
            null_kernel_tolerance, scale));
    k_mat /= norm;
    return DiscretizedKernel(std::move(k_mat), norm, grid, config);
}

} // namespace biphoton
