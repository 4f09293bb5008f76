#include "shadowcast/photophysics.hpp"

#include <cmath>

namespace shadowcast::photophysics {

namespace {
void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}
}  // namespace

void TransitionParams::validate() const {
    require_finite(lambda, "lambda");
    require_finite(tau, "tau");
    require_finite(kappa_pol, "kappa_pol");
    if (lambda <= 0.0) throw std::invalid_argument("lambda must be > 0");
    if (tau <= 0.0) throw std::invalid_argument("tau must be > 0");
    if (kappa_pol <= 0.0 || kappa_pol > 1.0)
        throw std::invalid_argument("kappa_pol must be in (0, 1]");
}

void LaserParams::validate() const {
    require_finite(detuning, "detuning");
    require_finite(intensity, "intensity");
    if (intensity < 0.0) throw std::invalid_argument("intensity must be >= 0");
}

double LaserParams::s0(const TransitionParams& t) const {
    return intensity / saturation_intensity(t);
}

double scattering_rate(const TransitionParams& t, double s0, double delta) {
    t.validate();
    require_finite(s0, "s0");
    require_finite(delta, "delta");
    if (s0 < 0.0) throw std::invalid_argument("s0 must be >= 0");
    const double g = t.gamma();
    const double d = delta / g;
    return 0.5 * g * s0 / (1.0 + s0 + 4.0 * d * d);
}

double scattered_power(const TransitionParams& t, double s0, double delta) {
    return scattering_rate(t, s0, delta) * t.photon_energy();
}

double saturation_intensity(const TransitionParams& t) {
    t.validate();
    return constants::pi * constants::planck * constants::speed_of_light /
           (3.0 * t.lambda * t.lambda * t.lambda * t.tau);
}

double resonant_cross_section(const TransitionParams& t) {
    t.validate();
    return 3.0 * t.lambda * t.lambda / constants::two_pi;
}

double max_absorbed_power(const TransitionParams& t) {
    t.validate();
    return constants::planck * constants::speed_of_light / (2.0 * t.lambda * t.tau);
}

double effective_cross_section(const TransitionParams& t, const LaserParams& laser) {
    laser.validate();
    if (laser.intensity <= 0.0)
        throw std::invalid_argument("effective_cross_section needs intensity > 0");
    return t.kappa_pol * scattered_power(t, laser.s0(t), laser.detuning) / laser.intensity;
}

double doppler_temperature(const TransitionParams& t, double delta, double s0) {
    t.validate();
    require_finite(delta, "delta");
    require_finite(s0, "s0");
    if (s0 < 0.0) throw std::invalid_argument("s0 must be >= 0");
    if (delta >= 0.0)
        throw no_cooling_equilibrium("no cooling equilibrium for detuning >= 0");
    const double g = t.gamma();
    const double u = 2.0 * std::abs(delta) / g;
    return constants::hbar * g / (4.0 * constants::boltzmann) * (1.0 + s0 + u * u) / u;
}

}  // namespace shadowcast::photophysics
