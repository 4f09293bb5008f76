#ifndef SHADOWCAST_CONSTANTS_HPP
#define SHADOWCAST_CONSTANTS_HPP

namespace shadowcast::constants {

// CODATA 2018, compiled in. No runtime overrides.
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double planck = 6.62607015e-34;         // J s (exact)
inline constexpr double speed_of_light = 299792458.0;    // m/s (exact)
inline constexpr double boltzmann = 1.380649e-23;        // J/K (exact)
inline constexpr double hbar = planck / two_pi;          // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// FWHM = sqrt(8 ln 2) * sigma for a Gaussian
inline constexpr double fwhm_per_sigma = 2.3548200450309493;
inline constexpr double ln2 = 0.6931471805599453;

}  // namespace shadowcast::constants

#endif
