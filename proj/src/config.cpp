#include "biphoton/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>

#include <fmt/format.h>

#include "biphoton/error.hpp"

namespace biphoton {

namespace {

double require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw ValidationError(fmt::format("{} must be finite, got {}", field, v));
    return v;
}

} // namespace

double reduce_phase(double theta) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(theta, two_pi);
    if (r < 0.0) r += two_pi;
    // fmod of a tiny negative number can round back up to exactly 2*pi
    if (r >= two_pi) r = 0.0;
    return r;
}

EnsembleShift::EnsembleShift(double delta_p, double delta_q, double theta)
    : delta_p_(require_finite(delta_p, "delta_p")),
      delta_q_(require_finite(delta_q, "delta_q")),
      theta_(reduce_phase(require_finite(theta, "theta"))) {}

void EnsembleShift::set_delta_p(double v) { delta_p_ = require_finite(v, "delta_p"); }
void EnsembleShift::set_delta_q(double v) { delta_q_ = require_finite(v, "delta_q"); }
void EnsembleShift::set_theta(double v) { theta_ = reduce_phase(require_finite(v, "theta")); }

MultiplexConfig::MultiplexConfig(std::vector<EnsembleShift> ensembles, double gamma3N, double tau)
    : ensembles_(std::move(ensembles)), gamma3N_(gamma3N), tau_(tau) {
    validate();
}

bool MultiplexConfig::common_joint_shift() const noexcept {
    for (const auto& e : ensembles_)
        if (e.delta_q() != ensembles_.front().delta_q()) return false;
    return true;
}

void MultiplexConfig::validate() const {
    if (ensembles_.empty()) throw ValidationError("ensembles: at least one ensemble is required");
    if (!(gamma3N_ > 0.0) || !std::isfinite(gamma3N_))
        throw ValidationError(fmt::format("gamma3N must be positive and finite, got {}", gamma3N_));
    if (!(tau_ > 0.0) || !std::isfinite(tau_))
        throw ValidationError(fmt::format("tau must be positive and finite, got {}", tau_));
}

std::string MultiplexConfig::digest() const {
    // FNV-1a over the bit patterns of every parameter.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof bits == sizeof v);
        std::memcpy(&bits, &v, sizeof v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(gamma3N_);
    mix(tau_);
    for (const auto& e : ensembles_) {
        mix(e.delta_p());
        mix(e.delta_q());
        mix(e.theta());
    }
    return fmt::format("{:016x}", h);
}

} // namespace biphoton
