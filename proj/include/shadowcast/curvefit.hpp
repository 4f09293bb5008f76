#ifndef SHADOWCAST_CURVEFIT_HPP
#define SHADOWCAST_CURVEFIT_HPP

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "shadowcast/lm.hpp"

namespace shadowcast::curvefit {

enum class ScanKind { detuning, intensity, power };
enum class PointFlag { ok, non_detection, fit_failed };

const char* to_string(ScanKind k);
const char* to_string(PointFlag f);
ScanKind scan_kind_from_string(const std::string& s);

// One scan sample: control variable (MHz / W m^-2 / W by kind), observed
// value and its 1-sigma uncertainty.
struct ScanPoint {
    double control = 0.0;
    double value = 0.0;
    double sigma = 1.0;
    PointFlag flag = PointFlag::ok;
};

struct ScanSeries {
    ScanKind kind = ScanKind::detuning;
    std::vector<ScanPoint> points;

    // sigma > 0 everywhere, controls strictly monotone.
    void validate() const;
};

struct FitResult {
    std::vector<std::string> param_names;
    Eigen::VectorXd params;
    Eigen::VectorXd uncertainties;  // 1 sigma
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
    std::string message;

    double param(const std::string& name) const;
    double uncertainty(const std::string& name) const;
};

// y(p, x) with analytic gradient dy/dp.
struct ParametricModel {
    std::vector<std::string> param_names;
    std::function<double(const Eigen::VectorXd&, double)> value;
    std::function<void(const Eigen::VectorXd&, double, Eigen::VectorXd&)> gradient;
};

// Weighted Levenberg-Marquardt fit of the model to the series,
// minimizing sum ((value - model)/sigma)^2. Deterministic.
FitResult least_squares(const ParametricModel& model, const ScanSeries& series,
                        const Eigen::VectorXd& init);

// Step-weighted Lorentzian, C(d) = Theta(-d) A / (1 + 4 d^2 / g^2),
// identically zero for d >= 0 (laser heating makes the ion undetectable).
// Controls and gamma in MHz.
ParametricModel step_lorentzian_model();

// Contrast bleaching, C(I) = C_max / (1 + I / I_sat_fit).
ParametricModel contrast_saturation_model();

// Absorbed-power saturation, P(Pin) = P_max (Pin/P_sat) / (1 + Pin/P_sat).
ParametricModel power_saturation_model();

// Named fits with derivative-free auto-initialization from the data.
FitResult fit_lineshape(const ScanSeries& series);           // {amplitude, gamma_fwhm_mhz}
FitResult fit_contrast_saturation(const ScanSeries& series); // {c_max, i_sat_fit}

struct PowerFitResult : FitResult {
    double slope = 0.0;      // low-intensity diverted fraction, P_max/P_sat
    double slope_err = 0.0;
};
PowerFitResult fit_power_saturation(const ScanSeries& series);  // {p_max_fit, p_sat}

// CSV round-trip: header "control,value,sigma,flags".
void write_series_csv(std::ostream& os, const ScanSeries& series);
ScanSeries read_series_csv(std::istream& is, ScanKind kind);

}  // namespace shadowcast::curvefit

#endif
