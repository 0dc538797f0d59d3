#include "biphoton/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "biphoton/error.hpp"

// complex must be included before lapacke
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

namespace biphoton {

namespace {

using RealMatrix = Eigen::MatrixXd;

void check_info(lapack_int info, const char* routine) {
    if (info > 0) throw DecompositionError(fmt::format("{} did not converge ({} superdiagonals)", routine, info));
    if (info < 0) throw std::logic_error(fmt::format("{}: illegal argument {}", routine, -info));
}

std::vector<double> gesdd_values(ComplexMatrix a) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1),
               "zgesdd");
    return s;
}

std::vector<double> gesdd_values(RealMatrix a) {
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
    check_info(LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1),
               "dgesdd");
    return s;
}

std::vector<double> normalized_squares(const std::vector<double>& sigma) {
    double total = 0.0;
    for (double s : sigma) total += s * s;
    std::vector<double> lambda(sigma.size());
    for (std::size_t n = 0; n < sigma.size(); ++n) lambda[n] = sigma[n] * sigma[n] / total;
    return lambda;
}

} // namespace

std::vector<double> singular_values(const ComplexMatrix& m) { return gesdd_values(m); }

SchmidtSpectrum schmidt_decompose(const DiscretizedKernel& kernel, std::size_t retained_count) {
    ComplexMatrix a = kernel.matrix();
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    const lapack_int r = std::min(m, n);
    ComplexMatrix u(m, r);
    ComplexMatrix vt(r, n);
    std::vector<double> sigma(static_cast<std::size_t>(r));
    check_info(LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m, sigma.data(), u.data(), m, vt.data(), r),
               "zgesdd");

    const auto& grid = kernel.grid();
    const auto& ws = grid.signal().weights;
    const auto& wi = grid.idler().weights;
    const auto kept = static_cast<Eigen::Index>(std::min<std::size_t>(retained_count, static_cast<std::size_t>(r)));

    SchmidtSpectrum out{normalized_squares(sigma), ComplexMatrix(m, kept), ComplexMatrix(n, kept), grid};
    for (Eigen::Index mode = 0; mode < kept; ++mode) {
        auto psi = out.signal_modes.col(mode);
        auto phi = out.idler_modes.col(mode);
        for (Eigen::Index j = 0; j < m; ++j) psi(j) = u(j, mode) / std::sqrt(ws[j]);
        for (Eigen::Index k = 0; k < n; ++k) phi(k) = vt(mode, k) / std::sqrt(wi[k]);

        Eigen::Index peak = 0;
        psi.cwiseAbs().maxCoeff(&peak);
        const double mag = std::abs(psi(peak));
        if (mag > 0.0) {
            const cplx rot = std::conj(psi(peak)) / mag;
            psi *= rot;
            phi *= std::conj(rot);
            psi(peak) = cplx(std::abs(psi(peak)), 0.0);
        }
    }
    return out;
}

std::vector<double> schmidt_eigenvalues(const DiscretizedKernel& kernel) {
    // K = (real positive Gaussian ridge) x diag(column phases) when delta_q is common to all
    // ensembles; a diagonal unitary on the right leaves the singular values untouched.
    if (kernel.config().common_joint_shift()) return normalized_squares(gesdd_values(RealMatrix(kernel.matrix().cwiseAbs())));
    return normalized_squares(gesdd_values(kernel.matrix()));
}

std::vector<double> oracle_reduced_density(const ComplexMatrix& kernel) {
    const ComplexMatrix rho = kernel * kernel.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw DecompositionError("Hermitian eigensolver did not converge");
    const Eigen::VectorXd ev = solver.eigenvalues();
    return {ev.reverse().begin(), ev.reverse().end()};
}

std::vector<double> oracle_reduced_density(const DiscretizedKernel& kernel) {
    return oracle_reduced_density(kernel.matrix());
}

ModeDensity mode_density(const SchmidtSpectrum& spectrum, std::size_t n) {
    if (n < 1 || n > spectrum.retained_count())
        throw std::out_of_range(fmt::format("mode index {} outside 1..{}", n, spectrum.retained_count()));
    const auto col = static_cast<Eigen::Index>(n - 1);
    ModeDensity d;
    d.signal.resize(static_cast<std::size_t>(spectrum.signal_modes.rows()));
    d.idler.resize(static_cast<std::size_t>(spectrum.idler_modes.rows()));
    for (std::size_t j = 0; j < d.signal.size(); ++j)
        d.signal[j] = std::norm(spectrum.signal_modes(static_cast<Eigen::Index>(j), col));
    for (std::size_t k = 0; k < d.idler.size(); ++k)
        d.idler[k] = std::norm(spectrum.idler_modes(static_cast<Eigen::Index>(k), col));
    return d;
}

DegeneracyReport detect_degeneracy(const std::vector<double>& eigenvalues, double rel_tol, std::size_t K) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ValidationError(fmt::format("rel_tol must lie in (0, 1), got {}", rel_tol));
    if (K > eigenvalues.size())
        throw ValidationError(fmt::format("K = {} exceeds the {} available eigenvalues", K, eigenvalues.size()));
    DegeneracyReport report;
    report.rel_tol = rel_tol;
    for (std::size_t n = 0; n < K; ++n) {
        bool joins = false;
        if (n > 0) {
            const double prev = eigenvalues[n - 1];
            const double gap = prev - eigenvalues[n];
            joins = prev > 0.0 ? gap / prev < rel_tol : eigenvalues[n] == 0.0;
        }
        if (!joins) report.groups.emplace_back();
        report.groups.back().push_back(n + 1);
    }
    return report;
}

DegeneracyReport detect_degeneracy(const SchmidtSpectrum& spectrum, double rel_tol, std::size_t K) {
    if (K > spectrum.retained_count())
        throw ValidationError(fmt::format("K = {} exceeds retained_count {}", K, spectrum.retained_count()));
    return detect_degeneracy(spectrum.eigenvalues, rel_tol, K);
}

std::size_t count_peaks(const std::vector<double>& samples, double rel_prominence) {
    const std::size_t n = samples.size();
    if (n < 3) return 0;
    const double top = *std::max_element(samples.begin(), samples.end());
    const double floor = rel_prominence * top;
    std::size_t count = 0;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(samples[i] > samples[i - 1])) {
            ++i;
            continue;
        }
        // a flat top counts once, and only if it falls off on the right
        std::size_t j = i;
        while (j + 1 < n && samples[j + 1] == samples[i]) ++j;
        if (j + 1 >= n || !(samples[j + 1] < samples[i])) {
            i = j + 1;
            continue;
        }
        const double h = samples[i];
        double left_min = h;
        for (std::size_t l = i; l-- > 0;) {
            if (samples[l] > h) break;
            left_min = std::min(left_min, samples[l]);
        }
        double right_min = h;
        for (std::size_t r = j + 1; r < n; ++r) {
            if (samples[r] > h) break;
            right_min = std::min(right_min, samples[r]);
        }
        if (h - std::max(left_min, right_min) >= floor) ++count;
        i = j + 1;
    }
    return count;
}

} // namespace biphoton
