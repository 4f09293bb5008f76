#include "shadowcast/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "shadowcast/errors.hpp"
#include "shadowcast/photophysics.hpp"

namespace shadowcast::config {

namespace {

struct Key {
    const char* name;
    std::function<double(const RunConfig&)> get;
    std::function<void(RunConfig&, double)> set;
    bool integer = false;
};

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = {
        {"lambda_nm", [](const RunConfig& c) { return c.lambda_nm; },
         [](RunConfig& c, double v) { c.lambda_nm = v; }},
        {"tau_ns", [](const RunConfig& c) { return c.tau_ns; },
         [](RunConfig& c, double v) { c.tau_ns = v; }},
        {"kappa_pol", [](const RunConfig& c) { return c.kappa_pol; },
         [](RunConfig& c, double v) { c.kappa_pol = v; }},
        {"kappa_cal", [](const RunConfig& c) { return c.kappa_cal; },
         [](RunConfig& c, double v) { c.kappa_cal = v; }},
        {"detuning_mhz", [](const RunConfig& c) { return c.detuning_mhz; },
         [](RunConfig& c, double v) { c.detuning_mhz = v; }},
        {"intensity_w_m2", [](const RunConfig& c) { return c.intensity_w_m2; },
         [](RunConfig& c, double v) { c.intensity_w_m2 = v; }},
        {"beam_power_nw", [](const RunConfig& c) { return c.beam_power_nw; },
         [](RunConfig& c, double v) { c.beam_power_nw = v; }},
        {"beam_fwhm_um", [](const RunConfig& c) { return c.beam_fwhm_um; },
         [](RunConfig& c, double v) { c.beam_fwhm_um = v; }},
        {"beam_center_x_um", [](const RunConfig& c) { return c.beam_center_x_um; },
         [](RunConfig& c, double v) { c.beam_center_x_um = v; }},
        {"beam_center_y_um", [](const RunConfig& c) { return c.beam_center_y_um; },
         [](RunConfig& c, double v) { c.beam_center_y_um = v; }},
        {"pointing_jitter_rms_um", [](const RunConfig& c) { return c.pointing_jitter_rms_um; },
         [](RunConfig& c, double v) { c.pointing_jitter_rms_um = v; }},
        {"na", [](const RunConfig& c) { return c.na; },
         [](RunConfig& c, double v) { c.na = v; }},
        {"magnification", [](const RunConfig& c) { return c.magnification; },
         [](RunConfig& c, double v) { c.magnification = v; }},
        {"psf_fwhm_nm", [](const RunConfig& c) { return c.psf_fwhm_nm; },
         [](RunConfig& c, double v) { c.psf_fwhm_nm = v; }},
        {"transmission", [](const RunConfig& c) { return c.transmission; },
         [](RunConfig& c, double v) { c.transmission = v; }},
        {"etalon_amplitude", [](const RunConfig& c) { return c.etalon_amplitude; },
         [](RunConfig& c, double v) { c.etalon_amplitude = v; }},
        {"etalon_period_um", [](const RunConfig& c) { return c.etalon_period_um; },
         [](RunConfig& c, double v) { c.etalon_period_um = v; }},
        {"etalon_phase_rad", [](const RunConfig& c) { return c.etalon_phase_rad; },
         [](RunConfig& c, double v) { c.etalon_phase_rad = v; }},
        {"pixel_pitch_um", [](const RunConfig& c) { return c.pixel_pitch_um; },
         [](RunConfig& c, double v) { c.pixel_pitch_um = v; }},
        {"qe", [](const RunConfig& c) { return c.qe; },
         [](RunConfig& c, double v) { c.qe = v; }},
        {"read_noise_e", [](const RunConfig& c) { return c.read_noise_e; },
         [](RunConfig& c, double v) { c.read_noise_e = v; }},
        {"binning", [](const RunConfig& c) { return double(c.binning); },
         [](RunConfig& c, double v) { c.binning = std::int64_t(v); }, true},
        {"exposure_s", [](const RunConfig& c) { return c.exposure_s; },
         [](RunConfig& c, double v) { c.exposure_s = v; }},
        {"full_well_e", [](const RunConfig& c) { return c.full_well_e; },
         [](RunConfig& c, double v) { c.full_well_e = v; }},
        {"bit_depth", [](const RunConfig& c) { return double(c.bit_depth); },
         [](RunConfig& c, double v) { c.bit_depth = std::int64_t(v); }, true},
        {"image_width_px", [](const RunConfig& c) { return double(c.image_width_px); },
         [](RunConfig& c, double v) { c.image_width_px = std::int64_t(v); }, true},
        {"image_height_px", [](const RunConfig& c) { return double(c.image_height_px); },
         [](RunConfig& c, double v) { c.image_height_px = std::int64_t(v); }, true},
        {"spot_fwhm_x_nm", [](const RunConfig& c) { return c.spot_fwhm_x_nm; },
         [](RunConfig& c, double v) { c.spot_fwhm_x_nm = v; }},
        {"spot_fwhm_y_nm", [](const RunConfig& c) { return c.spot_fwhm_y_nm; },
         [](RunConfig& c, double v) { c.spot_fwhm_y_nm = v; }},
        {"ion_x_um", [](const RunConfig& c) { return c.ion_x_um; },
         [](RunConfig& c, double v) { c.ion_x_um = v; }},
        {"ion_y_um", [](const RunConfig& c) { return c.ion_y_um; },
         [](RunConfig& c, double v) { c.ion_y_um = v; }},
        {"contrast", [](const RunConfig& c) { return c.contrast; },
         [](RunConfig& c, double v) { c.contrast = v; }},
        {"mask_floor_counts", [](const RunConfig& c) { return c.mask_floor_counts; },
         [](RunConfig& c, double v) { c.mask_floor_counts = v; }},
        {"filter_r_high_px", [](const RunConfig& c) { return c.filter_r_high_px; },
         [](RunConfig& c, double v) { c.filter_r_high_px = v; }},
        {"filter_r_low_px", [](const RunConfig& c) { return c.filter_r_low_px; },
         [](RunConfig& c, double v) { c.filter_r_low_px = v; }},
        {"trap_freq_mhz", [](const RunConfig& c) { return c.trap_freq_mhz; },
         [](RunConfig& c, double v) { c.trap_freq_mhz = v; }},
        {"ion_mass_amu", [](const RunConfig& c) { return c.ion_mass_amu; },
         [](RunConfig& c, double v) { c.ion_mass_amu = v; }},
        {"seed", [](const RunConfig& c) { return double(c.seed); },
         [](RunConfig& c, double v) { c.seed = std::uint64_t(v); }, true},
    };
    return keys;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : key_table()) {
        if (key == k.name) {
            try {
                if (key == "seed") {
                    cfg.seed = std::stoull(value);
                } else {
                    k.set(cfg, std::stod(value));
                }
            } catch (const std::exception&) {
                throw config_error("bad value for " + key + ": '" + value + "'");
            }
            return;
        }
    }
    throw config_error("unknown config key: " + key);
}

RunConfig parse_config_text(const std::string& text, const RunConfig& base) {
    RunConfig cfg = base;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + " is not key = value");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return parse_config_text(ss.str(), base);
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

std::string echo_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& k : key_table()) {
        if (k.integer)
            os << k.name << " = " << static_cast<long long>(k.get(cfg)) << '\n';
        else
            os << k.name << " = " << format_g17(k.get(cfg)) << '\n';
    }
    return os.str();
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j;
    for (const auto& k : key_table()) {
        if (k.integer)
            j[k.name] = static_cast<std::int64_t>(k.get(cfg));
        else
            j[k.name] = k.get(cfg);
    }
    return j;
}

double resolved_contrast(const RunConfig& cfg) {
    if (cfg.contrast >= 0.0) return cfg.contrast;
    photophysics::TransitionParams t{cfg.lambda_nm * 1e-9, cfg.tau_ns * 1e-9, cfg.kappa_pol};
    photophysics::LaserParams laser{photophysics::detuning_from_mhz(cfg.detuning_mhz),
                                    cfg.intensity_w_m2};
    const double spot = std::sqrt(cfg.spot_fwhm_x_nm * cfg.spot_fwhm_y_nm) * 1e-9;
    return imaging::predict_peak_contrast(t, laser, spot, cfg.kappa_cal);
}

imaging::Scene make_scene(const RunConfig& cfg) {
    imaging::Scene s;
    s.transition = {cfg.lambda_nm * 1e-9, cfg.tau_ns * 1e-9, cfg.kappa_pol};
    s.laser = {photophysics::detuning_from_mhz(cfg.detuning_mhz), cfg.intensity_w_m2};
    s.beam.power = cfg.beam_power_nw * 1e-9;
    s.beam.fwhm = cfg.beam_fwhm_um * 1e-6;
    s.beam.center_x = cfg.beam_center_x_um * 1e-6;
    s.beam.center_y = cfg.beam_center_y_um * 1e-6;
    s.beam.pointing_jitter_rms = cfg.pointing_jitter_rms_um * 1e-6;
    s.imaging.na = cfg.na;
    s.imaging.magnification = cfg.magnification;
    s.imaging.psf_fwhm = cfg.psf_fwhm_nm * 1e-9;
    s.imaging.transmission = cfg.transmission;
    if (cfg.etalon_amplitude > 0.0)
        s.imaging.etalon = imaging::EtalonRipple{cfg.etalon_amplitude,
                                                 cfg.etalon_period_um * 1e-6,
                                                 cfg.etalon_phase_rad};
    s.camera.pixel_pitch = cfg.pixel_pitch_um * 1e-6;
    s.camera.qe = cfg.qe;
    s.camera.read_noise = cfg.read_noise_e;
    s.camera.binning = static_cast<int>(cfg.binning);
    s.camera.exposure = cfg.exposure_s;
    s.camera.full_well = cfg.full_well_e;
    s.camera.bit_depth = static_cast<int>(cfg.bit_depth);
    s.ion.peak_contrast = resolved_contrast(cfg);
    s.ion.fwhm_x = cfg.spot_fwhm_x_nm * 1e-9;
    s.ion.fwhm_y = cfg.spot_fwhm_y_nm * 1e-9;
    s.ion.center_x = cfg.ion_x_um * 1e-6;
    s.ion.center_y = cfg.ion_y_um * 1e-6;
    s.ion.shelved = false;
    s.width = static_cast<int>(cfg.image_width_px);
    s.height = static_cast<int>(cfg.image_height_px);
    return s;
}

}  // namespace shadowcast::config
