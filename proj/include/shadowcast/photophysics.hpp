#ifndef SHADOWCAST_PHOTOPHYSICS_HPP
#define SHADOWCAST_PHOTOPHYSICS_HPP

#include "shadowcast/constants.hpp"
#include "shadowcast/errors.hpp"

namespace shadowcast::photophysics {

// Two-level transition. Detunings and linewidths are angular (rad/s)
// internally; the CLI converts user-facing MHz at its boundary.
struct TransitionParams {
    double lambda = 369.5e-9;  // transition wavelength, m
    double tau = 8.1e-9;       // excited-state lifetime, s
    double kappa_pol = 0.5;    // polarization / level-structure factor, (0, 1]

    double gamma() const { return 1.0 / tau; }  // natural linewidth, rad/s
    double linewidth_hz() const { return 1.0 / (constants::two_pi * tau); }
    double photon_energy() const { return constants::planck * constants::speed_of_light / lambda; }

    void validate() const;
};

struct LaserParams {
    double detuning = 0.0;   // angular detuning, rad/s; negative = red of resonance
    double intensity = 0.0;  // illumination intensity at the atom, W/m^2

    double s0(const TransitionParams& t) const;  // I / I_sat

    void validate() const;
};

inline double detuning_from_mhz(double mhz) { return constants::two_pi * mhz * 1e6; }
inline double detuning_to_mhz(double rad_s) { return rad_s / (constants::two_pi * 1e6); }

// Steady-state photon scattering rate of a two-level atom,
// (Gamma/2) s0 / (1 + s0 + 4 delta^2/Gamma^2).  Bounded by Gamma/2.
double scattering_rate(const TransitionParams& t, double s0, double delta);

// scattering_rate * photon energy; approaches max_absorbed_power as s0 -> inf on resonance.
double scattered_power(const TransitionParams& t, double s0, double delta);

// I_sat = pi h c / (3 lambda^3 tau)
double saturation_intensity(const TransitionParams& t);

// sigma_0 = 3 lambda^2 / (2 pi)
double resonant_cross_section(const TransitionParams& t);

// P_max = h c / (2 lambda tau); equals sigma_0 * I_sat identically.
double max_absorbed_power(const TransitionParams& t);

// kappa_pol * scattered_power / intensity.  Never exceeds sigma_0.
double effective_cross_section(const TransitionParams& t, const LaserParams& laser);

// Doppler-theory equilibrium temperature,
// T = (hbar Gamma / 4 kB) (1 + s0 + (2 delta/Gamma)^2) / (2|delta|/Gamma).
// Throws no_cooling_equilibrium for delta >= 0.
double doppler_temperature(const TransitionParams& t, double delta, double s0);

}  // namespace shadowcast::photophysics

#endif
