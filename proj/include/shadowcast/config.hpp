#ifndef SHADOWCAST_CONFIG_HPP
#define SHADOWCAST_CONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "shadowcast/imaging.hpp"

namespace shadowcast::config {

// Flat, diff-able run configuration. Defaults are the paper-regime operating
// point. User-facing units: MHz, W/m^2, nW, nm, um, s.
struct RunConfig {
    // transition
    double lambda_nm = 369.5;
    double tau_ns = 8.1;
    double kappa_pol = 0.5;
    // contrast calibration: fixes predict_peak_contrast to 0.031 at the
    // default operating point (570 W/m^2, -8 MHz, 485 nm spot).
    double kappa_cal = 0.705420;

    // laser
    double detuning_mhz = -8.0;
    double intensity_w_m2 = 570.0;

    // illumination beam
    double beam_power_nw = 15.0;
    double beam_fwhm_um = 4.8;
    double beam_center_x_um = 0.0;
    double beam_center_y_um = 0.0;
    double pointing_jitter_rms_um = 0.0;

    // imaging system
    double na = 0.64;
    double magnification = 615.0;
    double psf_fwhm_nm = 440.0;
    double transmission = 0.06;
    double etalon_amplitude = 0.0;
    double etalon_period_um = 2.0;
    double etalon_phase_rad = 0.0;

    // camera
    double pixel_pitch_um = 13.0;
    double qe = 0.35;
    double read_noise_e = 10.0;
    std::int64_t binning = 4;
    double exposure_s = 1.0;
    double full_well_e = 500000.0;
    std::int64_t bit_depth = 16;
    std::int64_t image_width_px = 64;
    std::int64_t image_height_px = 64;

    // ion spot
    double spot_fwhm_x_nm = 485.0;
    double spot_fwhm_y_nm = 485.0;
    double ion_x_um = 0.0;
    double ion_y_um = 0.0;
    double contrast = -1.0;  // < 0: derive from the physics at the configured laser point

    // analysis
    double mask_floor_counts = 100.0;
    double filter_r_high_px = 1.0;
    double filter_r_low_px = 20.0;

    // trap (spot-size model / constants table)
    double trap_freq_mhz = 1.0;
    double ion_mass_amu = 174.0;

    std::uint64_t seed = 1;
};

// key=value text round-trip ('#' comments, unknown keys rejected).
RunConfig parse_config_text(const std::string& text, const RunConfig& base = {});
RunConfig load_config_file(const std::string& path, const RunConfig& base = {});
std::string echo_config(const RunConfig& cfg);   // canonical key order, %.17g
nlohmann::json config_json(const RunConfig& cfg);

// Apply one key=value override (same keys as the file format).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Resolved peak contrast: explicit config value, or predicted from the
// physics at the configured laser point when contrast < 0.
double resolved_contrast(const RunConfig& cfg);

imaging::Scene make_scene(const RunConfig& cfg);

}  // namespace shadowcast::config

#endif
