#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace biphoton {

/// Reduce an angle to [0, 2*pi).
double reduce_phase(double theta) noexcept;

/// Frequency and phase shift applied to one ensemble's emission.
///
/// Frequencies are in units of the single-atom decay rate Gamma_3, phases in radians.
/// delta_p shifts the idler, delta_q shifts signal and idler jointly.
class EnsembleShift {
public:
    EnsembleShift() = default;
    EnsembleShift(double delta_p, double delta_q, double theta);

    double delta_p() const noexcept { return delta_p_; }
    double delta_q() const noexcept { return delta_q_; }
    /// Always in [0, 2*pi).
    double theta() const noexcept { return theta_; }

    void set_delta_p(double v);
    void set_delta_q(double v);
    void set_theta(double v);

    bool operator==(const EnsembleShift&) const = default;

private:
    double delta_p_ = 0.0;
    double delta_q_ = 0.0;
    double theta_ = 0.0;
};

/// Physical configuration: which ensembles are multiplexed, the superradiant
/// idler linewidth gamma3N (units of Gamma_3) and the pump width tau (units of 1/Gamma_3).
class MultiplexConfig {
public:
    static constexpr double default_gamma3N = 5.0;
    static constexpr double default_tau = 0.25;

    MultiplexConfig(std::vector<EnsembleShift> ensembles, double gamma3N = default_gamma3N,
                    double tau = default_tau);

    const std::vector<EnsembleShift>& ensembles() const noexcept { return ensembles_; }
    std::vector<EnsembleShift>& ensembles() noexcept { return ensembles_; }
    std::size_t size() const noexcept { return ensembles_.size(); }
    double gamma3N() const noexcept { return gamma3N_; }
    double tau() const noexcept { return tau_; }

    /// True when every ensemble carries the same joint shift delta_q. The kernel then
    /// factors into a real Gaussian ridge times a per-column phase.
    bool common_joint_shift() const noexcept;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    /// Short stable identifier for provenance records.
    std::string digest() const;

    bool operator==(const MultiplexConfig&) const = default;

private:
    std::vector<EnsembleShift> ensembles_;
    double gamma3N_;
    double tau_;
};

} // namespace biphoton
