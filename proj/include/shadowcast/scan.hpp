#ifndef SHADOWCAST_SCAN_HPP
#define SHADOWCAST_SCAN_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "shadowcast/analysis.hpp"
#include "shadowcast/config.hpp"
#include "shadowcast/curvefit.hpp"

namespace shadowcast::scan {

struct ScanPointRecord {
    double control = 0.0;
    imaging::Scene scene;
    imaging::Frame signal;
    imaging::Frame reference;
    analysis::GaussianFit2D fit;
    bool rendered = false;
};

// Renders and analyses one image per control value. Controls are processed
// in ascending order. Detuning controls >= 0 MHz become non-detection rows
// (value 0, sigma 1): with the laser on the blue side the ion heats and is
// not detectable until recooled. Analysis failures become fit_failed rows,
// never aborts. Per-point seeds derive deterministically from cfg.seed.
//
// Scan observables: detuning/intensity -> fitted contrast; power -> measured
// diverted power (W) vs power incident on sigma_0 (W).
curvefit::ScanSeries generate_scan(curvefit::ScanKind kind, const config::RunConfig& cfg,
                                   const std::vector<double>& controls,
                                   std::vector<ScanPointRecord>* records = nullptr);

// The scene actually used for one scan point (exposed for tests/CLI).
imaging::Scene scan_point_scene(curvefit::ScanKind kind, const config::RunConfig& cfg,
                                double control);

// Fit matching the scan kind (step-Lorentzian / contrast saturation /
// power saturation with slope).
curvefit::PowerFitResult fit_scan(const curvefit::ScanSeries& series);

}  // namespace shadowcast::scan

#endif
