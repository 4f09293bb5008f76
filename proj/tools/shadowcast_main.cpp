// shadowcast: forward simulator of single-atom absorption images plus the
// matching analysis pipeline (normalize, bandpass, 2D Gaussian fit,
// spectroscopic scans and curve fits). Outputs are deterministic for a fixed
// seed: PGM16 frames, key=value config echoes, CSV series, JSON fits.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shadowcast/analysis.hpp"
#include "shadowcast/config.hpp"
#include "shadowcast/constants.hpp"
#include "shadowcast/curvefit.hpp"
#include "shadowcast/errors.hpp"
#include "shadowcast/pgm.hpp"
#include "shadowcast/photophysics.hpp"
#include "shadowcast/scan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shadowcast;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda_nm, tau_ns, detuning_mhz, intensity, contrast, exposure_s,
        spot_fwhm_nm, beam_power_nw, beam_fwhm_um;
    std::optional<std::int64_t> binning;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--set", o.sets, "override a config key, e.g. --set qe=0.5")
        ->type_name("KEY=VALUE");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "random seed (fallback: config file, SHADOWCAST_SEED)");
    cmd->add_option("--lambda", o.lambda_nm, "transition wavelength, nm");
    cmd->add_option("--tau", o.tau_ns, "excited-state lifetime, ns");
    cmd->add_option("--detuning", o.detuning_mhz, "laser detuning, MHz");
    cmd->add_option("--intensity", o.intensity, "intensity at the ion, W/m^2");
    cmd->add_option("--contrast", o.contrast, "ion peak contrast (default: from physics)");
    cmd->add_option("--exposure", o.exposure_s, "exposure, s");
    cmd->add_option("--spot-fwhm", o.spot_fwhm_nm, "ion spot FWHM (both axes), nm");
    cmd->add_option("--beam-power", o.beam_power_nw, "beam power, nW");
    cmd->add_option("--beam-fwhm", o.beam_fwhm_um, "beam FWHM, um");
    cmd->add_option("--binning", o.binning, "camera binning (1,2,4,8)");
}

config::RunConfig resolve_config(const CommonOpts& o) {
    config::RunConfig cfg;
    if (const char* env = std::getenv("SHADOWCAST_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw config_error(std::string("SHADOWCAST_SEED is not an integer: ") + env);
        }
    }
    if (!o.config_path.empty()) cfg = config::load_config_file(o.config_path, cfg);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw config_error("--set needs KEY=VALUE, got: " + kv);
        config::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.lambda_nm) cfg.lambda_nm = *o.lambda_nm;
    if (o.tau_ns) cfg.tau_ns = *o.tau_ns;
    if (o.detuning_mhz) cfg.detuning_mhz = *o.detuning_mhz;
    if (o.intensity) cfg.intensity_w_m2 = *o.intensity;
    if (o.contrast) cfg.contrast = *o.contrast;
    if (o.exposure_s) cfg.exposure_s = *o.exposure_s;
    if (o.spot_fwhm_nm) cfg.spot_fwhm_x_nm = cfg.spot_fwhm_y_nm = *o.spot_fwhm_nm;
    if (o.beam_power_nw) cfg.beam_power_nw = *o.beam_power_nw;
    if (o.beam_fwhm_um) cfg.beam_fwhm_um = *o.beam_fwhm_um;
    if (o.binning) cfg.binning = *o.binning;
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

imaging::Scene scene_or_config_error(const config::RunConfig& cfg) {
    try {
        imaging::Scene s = config::make_scene(cfg);
        s.validate();
        return s;
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw io_error("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

double json_safe(double v) {
    if (std::isnan(v)) return 0.0;
    if (std::isinf(v)) return v > 0 ? 1e300 : -1e300;
    return v;
}

json frame_sidecar(const imaging::Frame& frame, const imaging::Scene& scene,
                   const config::RunConfig& cfg) {
    json j;
    j["kind"] = imaging::to_string(frame.meta.kind);
    j["seed"] = frame.meta.seed;
    j["exposure_s"] = frame.meta.exposure;
    j["binning"] = frame.meta.binning;
    j["saturated"] = frame.meta.saturated;
    j["width"] = frame.width;
    j["height"] = frame.height;
    j["maxval"] = frame.maxval;
    j["pixel_size_object_m"] = scene.camera.object_pixel(scene.imaging.magnification);
    j["intensity_at_ion_w_m2"] = scene.laser.intensity;
    j["beam_center_x_m"] = frame.meta.beam_center_x;
    j["beam_center_y_m"] = frame.meta.beam_center_y;
    j["peak_contrast"] = scene.ion.peak_contrast;
    j["gain_e_per_adu"] = scene.camera.gain();
    j["config"] = config::config_json(cfg);
    return j;
}

pgm::Pgm16 to_pgm(const imaging::Frame& f) {
    return pgm::Pgm16{f.width, f.height, f.maxval, f.counts};
}

void write_frame(const fs::path& dir, const std::string& stem, const imaging::Frame& frame,
                 const imaging::Scene& scene, const config::RunConfig& cfg) {
    pgm::write_pgm16((dir / (stem + ".pgm")).string(), to_pgm(frame));
    write_json_file(dir / (stem + ".json"), frame_sidecar(frame, scene, cfg));
}

// ---------------------------------------------------------------- constants

int cmd_constants(const config::RunConfig& cfg) {
    photophysics::TransitionParams t{cfg.lambda_nm * 1e-9, cfg.tau_ns * 1e-9, cfg.kappa_pol};
    try {
        t.validate();
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
    const double isat = photophysics::saturation_intensity(t);
    const double sigma0 = photophysics::resonant_cross_section(t);
    const double pmax = photophysics::max_absorbed_power(t);
    std::printf("lambda_nm        %.10g\n", cfg.lambda_nm);
    std::printf("tau_ns           %.10g\n", cfg.tau_ns);
    std::printf("gamma_fwhm_mhz   %.10g\n", t.linewidth_hz() / 1e6);
    std::printf("i_sat_w_m2       %.10g\n", isat);
    std::printf("sigma0_m2        %.10g\n", sigma0);
    std::printf("p_max_pw         %.10g\n", pmax * 1e12);
    std::printf("sigma0_isat_pw   %.10g\n", sigma0 * isat * 1e12);
    std::printf("s0               %.10g\n", cfg.intensity_w_m2 / isat);
    return 0;
}

// ----------------------------------------------------------------- simulate

int cmd_simulate(const config::RunConfig& cfg, const std::string& out_dir) {
    const imaging::Scene scene = scene_or_config_error(cfg);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    auto [signal, reference] = imaging::render_pair(scene, cfg.seed);
    write_frame(dir, "signal", signal, scene, cfg);
    write_frame(dir, "reference", reference, scene, cfg);
    write_text(dir / "resolved_config.cfg", config::echo_config(cfg));

    json meta;
    meta["command"] = "simulate";
    meta["seed"] = cfg.seed;
    meta["config"] = config::config_json(cfg);
    meta["frames"]["signal"] = frame_sidecar(signal, scene, cfg);
    meta["frames"]["reference"] = frame_sidecar(reference, scene, cfg);
    meta["derived"]["resolved_contrast"] = scene.ion.peak_contrast;
    meta["derived"]["pixel_size_object_m"] =
        scene.camera.object_pixel(scene.imaging.magnification);
    meta["derived"]["beam_peak_intensity_w_m2"] = scene.beam.peak_intensity();
    write_json_file(dir / "metadata.json", meta);

    std::printf("wrote %s/{signal,reference}.pgm (+json), metadata.json  seed=%llu\n",
                out_dir.c_str(), static_cast<unsigned long long>(cfg.seed));
    return 0;
}

// ------------------------------------------------------------------ analyze

struct LoadedFrame {
    imaging::Frame frame;
    json sidecar;
};

LoadedFrame load_frame(const std::string& pgm_path) {
    LoadedFrame lf;
    pgm::Pgm16 img = pgm::read_pgm16(pgm_path);
    fs::path sidecar_path(pgm_path);
    sidecar_path.replace_extension(".json");
    std::ifstream is(sidecar_path);
    if (!is) throw io_error("missing frame sidecar: " + sidecar_path.string());
    try {
        is >> lf.sidecar;
    } catch (const std::exception& e) {
        throw io_error("bad frame sidecar " + sidecar_path.string() + ": " + e.what());
    }
    lf.frame.width = img.width;
    lf.frame.height = img.height;
    lf.frame.maxval = img.maxval;
    lf.frame.counts = std::move(img.samples);
    lf.frame.meta.kind = lf.sidecar.value("kind", "signal") == std::string("reference")
                             ? imaging::FrameKind::reference
                             : imaging::FrameKind::signal;
    lf.frame.meta.seed = lf.sidecar.value("seed", 0ull);
    lf.frame.meta.exposure = lf.sidecar.value("exposure_s", 0.0);
    lf.frame.meta.binning = lf.sidecar.value("binning", 1);
    lf.frame.meta.saturated = lf.sidecar.value("saturated", false);
    return lf;
}

int cmd_analyze(const config::RunConfig& cfg, const std::string& signal_path,
                const std::string& reference_path, bool no_filter,
                const std::string& json_path, const std::string& filtered_map_path) {
    LoadedFrame sig = load_frame(signal_path);
    LoadedFrame ref = load_frame(reference_path);

    analysis::AbsorptionImage map;
    try {
        map = analysis::normalize_difference(sig.frame, ref.frame, cfg.mask_floor_counts);
    } catch (const std::exception& e) {
        throw config_error(e.what());
    }
    const double pixel_size = sig.sidecar.value("pixel_size_object_m", 0.0);
    const double intensity = sig.sidecar.value("intensity_at_ion_w_m2", 0.0);
    map.provenance.pixel_size = pixel_size;

    analysis::AbsorptionImage for_fit = map;
    if (!no_filter)
        for_fit = analysis::bandpass_filter(map, cfg.filter_r_high_px, cfg.filter_r_low_px);

    analysis::GaussianFit2D fit = analysis::fit_gaussian_2d(for_fit);

    json out;
    out["inputs"]["signal"] = signal_path;
    out["inputs"]["reference"] = reference_path;
    out["inputs"]["signal_seed"] = sig.frame.meta.seed;
    out["inputs"]["reference_seed"] = ref.frame.meta.seed;
    out["filtered"] = !no_filter;
    if (!no_filter) {
        out["filter_r_high_px"] = cfg.filter_r_high_px;
        out["filter_r_low_px"] = cfg.filter_r_low_px;
    }
    out["converged"] = fit.converged;
    out["iterations"] = fit.iterations;
    out["message"] = fit.message;
    out["contrast"] = json_safe(fit.amplitude);
    out["contrast_err"] = json_safe(fit.amplitude_err);
    out["center_x_px"] = json_safe(fit.center_x);
    out["center_y_px"] = json_safe(fit.center_y);
    out["fwhm_x_px"] = json_safe(fit.fwhm_x);
    out["fwhm_y_px"] = json_safe(fit.fwhm_y);
    out["fwhm_x_err_px"] = json_safe(fit.fwhm_x_err);
    out["fwhm_y_err_px"] = json_safe(fit.fwhm_y_err);
    out["offset"] = json_safe(fit.offset);
    out["residual_rms"] = json_safe(fit.residual_rms);
    out["param_names"] = fit.param_names;
    {
        std::vector<std::vector<double>> cov;
        for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
            std::vector<double> row;
            for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
                row.push_back(json_safe(fit.covariance(r, c)));
            cov.push_back(std::move(row));
        }
        out["covariance"] = cov;
    }

    if (fit.converged) {
        const double snr = analysis::image_snr(map, fit);
        out["snr"] = json_safe(snr);
        if (pixel_size > 0.0) {
            out["fwhm_x_nm"] = json_safe(fit.fwhm_x * pixel_size * 1e9);
            out["fwhm_y_nm"] = json_safe(fit.fwhm_y * pixel_size * 1e9);
            if (intensity > 0.0) {
                out["diverted_power_w"] =
                    json_safe(analysis::diverted_power(fit, intensity, pixel_size));
                out["diverted_power_err_w"] =
                    json_safe(analysis::diverted_power_err(fit, intensity, pixel_size));
            }
        }
        const bool negative =
            fit.amplitude < 0.0 && std::abs(fit.amplitude) > 2.0 * fit.amplitude_err;
        out["negative_amplitude"] = negative;
        if (negative)
            std::fprintf(stderr,
                         "warning: fitted amplitude is negative at >2 sigma; "
                         "signal/reference arguments may be swapped\n");
    }

    if (!filtered_map_path.empty()) {
        // Affine-scaled 16-bit export of the map the fit saw; scale in sidecar.
        double lo = 1e300, hi = -1e300;
        for (std::size_t p = 0; p < for_fit.values.v.size(); ++p)
            if (for_fit.mask[p]) {
                lo = std::min(lo, for_fit.values.v[p]);
                hi = std::max(hi, for_fit.values.v[p]);
            }
        if (hi <= lo) hi = lo + 1.0;
        pgm::Pgm16 img{for_fit.width(), for_fit.height(), 65535, {}};
        img.samples.resize(for_fit.values.v.size(), 0);
        for (std::size_t p = 0; p < for_fit.values.v.size(); ++p)
            if (for_fit.mask[p])
                img.samples[p] = static_cast<std::uint16_t>(
                    std::lround((for_fit.values.v[p] - lo) / (hi - lo) * 65535.0));
        pgm::write_pgm16(filtered_map_path, img);
        json scale;
        scale["value_at_0"] = lo;
        scale["value_at_maxval"] = hi;
        scale["filtered"] = !no_filter;
        fs::path sp(filtered_map_path);
        sp.replace_extension(".json");
        write_json_file(sp, scale);
        out["filtered_map"] = filtered_map_path;
    }

    if (!json_path.empty()) write_json_file(json_path, out);

    if (!fit.converged) {
        std::printf("%s\n", out.dump(2).c_str());
        throw nonconvergence_error("2D Gaussian fit did not converge: " + fit.message);
    }

    std::printf("contrast        %.6g +- %.2g\n", fit.amplitude, fit.amplitude_err);
    if (pixel_size > 0.0)
        std::printf("fwhm_nm         %.6g x %.6g\n", fit.fwhm_x * pixel_size * 1e9,
                    fit.fwhm_y * pixel_size * 1e9);
    else
        std::printf("fwhm_px         %.6g x %.6g\n", fit.fwhm_x, fit.fwhm_y);
    std::printf("snr             %.6g\n", out.value("snr", 0.0));
    if (out.contains("diverted_power_w"))
        std::printf("diverted_pw     %.6g\n", out["diverted_power_w"].get<double>() * 1e12);
    return 0;
}

// --------------------------------------------------------------------- scan

json fit_result_json(const curvefit::PowerFitResult& fr, curvefit::ScanKind kind) {
    json j;
    j["kind"] = curvefit::to_string(kind);
    switch (kind) {
        case curvefit::ScanKind::detuning: j["model"] = "step_lorentzian"; break;
        case curvefit::ScanKind::intensity: j["model"] = "contrast_saturation"; break;
        case curvefit::ScanKind::power: j["model"] = "power_saturation"; break;
    }
    for (std::size_t i = 0; i < fr.param_names.size(); ++i) {
        j["params"][fr.param_names[i]] = json_safe(fr.params[static_cast<Eigen::Index>(i)]);
        j["uncertainties"][fr.param_names[i]] =
            json_safe(fr.uncertainties[static_cast<Eigen::Index>(i)]);
    }
    std::vector<std::vector<double>> cov;
    for (Eigen::Index r = 0; r < fr.covariance.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < fr.covariance.cols(); ++c)
            row.push_back(json_safe(fr.covariance(r, c)));
        cov.push_back(std::move(row));
    }
    j["covariance"] = cov;
    j["chi2"] = json_safe(fr.chi2);
    j["dof"] = fr.dof;
    j["iterations"] = fr.iterations;
    j["converged"] = fr.converged;
    j["message"] = fr.message;
    if (kind == curvefit::ScanKind::power) {
        j["slope"] = json_safe(fr.slope);
        j["slope_err"] = json_safe(fr.slope_err);
    }
    return j;
}

int cmd_scan(const config::RunConfig& cfg, const std::string& kind_str, double from, double to,
             int points, const std::string& spacing, bool keep_frames,
             const std::string& out_dir) {
    const curvefit::ScanKind kind = curvefit::scan_kind_from_string(kind_str);
    if (points < 4) throw config_error("scan needs at least 4 control points");
    if (from >= to) throw config_error("scan needs from < to");
    scene_or_config_error(cfg);  // validate the base configuration up front

    std::string sp = spacing;
    if (sp.empty()) sp = kind == curvefit::ScanKind::detuning ? "linear" : "geometric";
    std::vector<double> controls(static_cast<std::size_t>(points));
    if (sp == "linear") {
        for (int i = 0; i < points; ++i)
            controls[static_cast<std::size_t>(i)] = from + (to - from) * i / (points - 1);
    } else if (sp == "geometric") {
        if (!(from > 0.0)) throw config_error("geometric spacing needs from > 0");
        for (int i = 0; i < points; ++i)
            controls[static_cast<std::size_t>(i)] =
                from * std::pow(to / from, double(i) / (points - 1));
    } else {
        throw config_error("spacing must be linear or geometric");
    }

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::vector<scan::ScanPointRecord> records;
    curvefit::ScanSeries series =
        scan::generate_scan(kind, cfg, controls, keep_frames ? &records : nullptr);

    {
        std::ostringstream csv;
        curvefit::write_series_csv(csv, series);
        write_text(dir / "scan.csv", csv.str());
    }
    write_text(dir / "resolved_config.cfg", config::echo_config(cfg));

    if (keep_frames) {
        const fs::path fdir = dir / "frames";
        fs::create_directories(fdir);
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!records[i].rendered) continue;
            char stem[64];
            std::snprintf(stem, sizeof stem, "point_%03zu", i);
            write_frame(fdir, std::string(stem) + "_signal", records[i].signal,
                        records[i].scene, cfg);
            write_frame(fdir, std::string(stem) + "_reference", records[i].reference,
                        records[i].scene, cfg);
        }
    }

    curvefit::PowerFitResult fr;
    bool fit_threw = false;
    std::string fit_error;
    try {
        fr = scan::fit_scan(series);
    } catch (const std::exception& e) {
        fit_threw = true;
        fit_error = e.what();
    }

    json j = fit_threw ? json{{"kind", curvefit::to_string(kind)},
                              {"converged", false},
                              {"message", fit_error}}
                       : fit_result_json(fr, kind);
    j["series_csv"] = "scan.csv";
    j["seed"] = cfg.seed;
    write_json_file(dir / "scan_fit.json", j);

    if (fit_threw) throw nonconvergence_error("scan fit failed: " + fit_error);
    if (!fr.converged) throw nonconvergence_error("scan fit did not converge: " + fr.message);

    std::printf("scan %s: %d points -> %s/scan.csv\n", kind_str.c_str(), points,
                out_dir.c_str());
    for (std::size_t i = 0; i < fr.param_names.size(); ++i)
        std::printf("%-16s %.6g +- %.3g\n", fr.param_names[i].c_str(),
                    fr.params[static_cast<Eigen::Index>(i)],
                    fr.uncertainties[static_cast<Eigen::Index>(i)]);
    if (kind == curvefit::ScanKind::power)
        std::printf("%-16s %.6g +- %.3g\n", "slope", fr.slope, fr.slope_err);
    return 0;
}

// ---------------------------------------------------------------------- fit

int cmd_fit(const std::string& kind_str, const std::string& in_csv,
            const std::string& json_path) {
    const curvefit::ScanKind kind = curvefit::scan_kind_from_string(kind_str);
    std::ifstream is(in_csv);
    if (!is) throw io_error("cannot open series CSV: " + in_csv);
    curvefit::ScanSeries series;
    try {
        series = curvefit::read_series_csv(is, kind);
    } catch (const std::exception& e) {
        throw config_error(std::string("bad series CSV: ") + e.what());
    }
    curvefit::PowerFitResult fr;
    try {
        fr = scan::fit_scan(series);
    } catch (const std::exception& e) {
        throw nonconvergence_error(std::string("fit failed: ") + e.what());
    }
    json j = fit_result_json(fr, kind);
    if (!json_path.empty()) write_json_file(json_path, j);
    std::printf("%s\n", j.dump(2).c_str());
    if (!fr.converged) throw nonconvergence_error("fit did not converge: " + fr.message);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-atom absorption-imaging simulator and analysis pipeline"};
    app.require_subcommand(1);

    CommonOpts con_o, sim_o, ana_o, scan_o, fit_o;

    CLI::App* con = app.add_subcommand("constants", "print the radiometric desk-check table");
    add_common(con, con_o);

    CLI::App* sim = app.add_subcommand("simulate", "render a signal/reference frame pair");
    add_common(sim, sim_o);

    CLI::App* ana = app.add_subcommand("analyze", "contrast map, bandpass, 2D Gaussian fit");
    add_common(ana, ana_o);
    std::string signal_path, reference_path, ana_json = "analysis.json", filtered_map;
    bool no_filter = false;
    ana->add_option("signal", signal_path, "signal PGM (with .json sidecar)")->required();
    ana->add_option("reference", reference_path, "reference PGM (with .json sidecar)")
        ->required();
    ana->add_flag("--no-filter", no_filter, "skip the bandpass filter");
    ana->add_option("--json", ana_json, "fit-result JSON path ('' to skip)");
    ana->add_option("--filtered-map", filtered_map, "write the fitted map as PGM16");

    CLI::App* scn = app.add_subcommand("scan", "render+analyze a control-variable scan");
    add_common(scn, scan_o);
    std::string scan_kind, spacing;
    double scan_from = 0.0, scan_to = 0.0;
    int scan_points = 0;
    bool keep_frames = false;
    scn->add_option("--kind", scan_kind, "detuning | intensity | power")->required();
    scn->add_option("--from", scan_from, "first control value (MHz / W/m^2 / W)")->required();
    scn->add_option("--to", scan_to, "last control value")->required();
    scn->add_option("--points", scan_points, "number of control points (>= 4)")->required();
    scn->add_option("--spacing", spacing, "linear | geometric (default by kind)");
    scn->add_flag("--keep-frames", keep_frames, "keep per-point frames under out/frames");

    CLI::App* fitc = app.add_subcommand("fit", "fit a scan-series CSV");
    add_common(fitc, fit_o);
    std::string fit_kind, fit_in, fit_json = "fit.json";
    fitc->add_option("--kind", fit_kind, "detuning | intensity | power")->required();
    fitc->add_option("--in", fit_in, "series CSV path")->required();
    fitc->add_option("--json", fit_json, "fit-result JSON path ('' to skip)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (con->parsed()) return cmd_constants(resolve_config(con_o));
        if (sim->parsed()) return cmd_simulate(resolve_config(sim_o), sim_o.out_dir);
        if (ana->parsed())
            return cmd_analyze(resolve_config(ana_o), signal_path, reference_path, no_filter,
                               ana_json, filtered_map);
        if (scn->parsed())
            return cmd_scan(resolve_config(scan_o), scan_kind, scan_from, scan_to, scan_points,
                            spacing, keep_frames, scan_o.out_dir);
        if (fitc->parsed()) return cmd_fit(fit_kind, fit_in, fit_json);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const nonconvergence_error& e) {
        std::fprintf(stderr, "analysis did not converge: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
