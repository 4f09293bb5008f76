#include "shadowcast/curvefit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace shadowcast::curvefit {

const char* to_string(ScanKind k) {
    switch (k) {
        case ScanKind::detuning: return "detuning";
        case ScanKind::intensity: return "intensity";
        case ScanKind::power: return "power";
    }
    return "?";
}

const char* to_string(PointFlag f) {
    switch (f) {
        case PointFlag::ok: return "ok";
        case PointFlag::non_detection: return "non_detection";
        case PointFlag::fit_failed: return "fit_failed";
    }
    return "?";
}

ScanKind scan_kind_from_string(const std::string& s) {
    if (s == "detuning") return ScanKind::detuning;
    if (s == "intensity") return ScanKind::intensity;
    if (s == "power") return ScanKind::power;
    throw std::invalid_argument("unknown scan kind: " + s);
}

void ScanSeries::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].sigma > 0.0))
            throw std::invalid_argument("scan point sigma must be > 0");
        if (i > 0 && !(points[i].control > points[i - 1].control))
            throw std::invalid_argument("scan controls must be strictly increasing");
    }
}

double FitResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i)
        if (param_names[i] == name) return params[static_cast<Eigen::Index>(i)];
    throw std::invalid_argument("no fit parameter named " + name);
}

double FitResult::uncertainty(const std::string& name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i)
        if (param_names[i] == name) return uncertainties[static_cast<Eigen::Index>(i)];
    throw std::invalid_argument("no fit parameter named " + name);
}

FitResult least_squares(const ParametricModel& model, const ScanSeries& series,
                        const Eigen::VectorXd& init) {
    series.validate();
    if (!init.allFinite()) throw std::invalid_argument("init must be finite");
    const int n = static_cast<int>(init.size());
    const int m = static_cast<int>(series.points.size());
    if (m - n < 1) throw std::invalid_argument("need at least n_params + 1 points");

    auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        Eigen::VectorXd grad(n);
        for (int i = 0; i < m; ++i) {
            const auto& pt = series.points[static_cast<std::size_t>(i)];
            r[i] = (model.value(p, pt.control) - pt.value) / pt.sigma;
            if (J) {
                model.gradient(p, pt.control, grad);
                J->row(i) = grad.transpose() / pt.sigma;
            }
        }
    };

    lm::Result lr = lm::minimize(residuals, init, m);

    FitResult out;
    out.param_names = model.param_names;
    out.params = lr.params;
    out.covariance = lr.covariance;
    out.chi2 = lr.cost;
    out.dof = m - n;
    out.iterations = lr.iterations;
    out.converged = lr.converged;
    out.message = lr.message;
    out.uncertainties = lr.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

ParametricModel step_lorentzian_model() {
    ParametricModel m;
    m.param_names = {"amplitude", "gamma_fwhm_mhz"};
    m.value = [](const Eigen::VectorXd& p, double d) {
        if (d >= 0.0) return 0.0;
        const double g = p[1];
        return p[0] / (1.0 + 4.0 * d * d / (g * g));
    };
    m.gradient = [](const Eigen::VectorXd& p, double d, Eigen::VectorXd& grad) {
        if (d >= 0.0) {
            grad.setZero();
            return;
        }
        const double g = p[1];
        const double den = 1.0 + 4.0 * d * d / (g * g);
        grad[0] = 1.0 / den;
        grad[1] = p[0] * 8.0 * d * d / (g * g * g) / (den * den);
    };
    return m;
}

ParametricModel contrast_saturation_model() {
    ParametricModel m;
    m.param_names = {"c_max", "i_sat_fit"};
    m.value = [](const Eigen::VectorXd& p, double intensity) {
        return p[0] / (1.0 + intensity / p[1]);
    };
    m.gradient = [](const Eigen::VectorXd& p, double intensity, Eigen::VectorXd& grad) {
        const double den = 1.0 + intensity / p[1];
        grad[0] = 1.0 / den;
        grad[1] = p[0] * intensity / (p[1] * p[1] * den * den);
    };
    return m;
}

ParametricModel power_saturation_model() {
    ParametricModel m;
    m.param_names = {"p_max_fit", "p_sat"};
    m.value = [](const Eigen::VectorXd& p, double pin) {
        const double u = pin / p[1];
        return p[0] * u / (1.0 + u);
    };
    m.gradient = [](const Eigen::VectorXd& p, double pin, Eigen::VectorXd& grad) {
        const double u = pin / p[1];
        const double den = 1.0 + u;
        grad[0] = u / den;
        grad[1] = -p[0] * u / p[1] / (den * den);
    };
    return m;
}

FitResult fit_lineshape(const ScanSeries& series) {
    series.validate();
    int red = 0;
    for (const auto& pt : series.points)
        if (pt.control < 0.0) ++red;
    if (red < 4) throw std::invalid_argument("lineshape fit needs >= 4 red-detuned points");

    // Init: A from the extremal value, gamma from the half-max crossing.
    double a0 = 0.0;
    for (const auto& pt : series.points)
        if (pt.control < 0.0) a0 = std::max(a0, pt.value);
    if (a0 <= 0.0) a0 = 1e-3;
    double g0 = 0.0;
    for (const auto& pt : series.points)
        if (pt.control < 0.0 && pt.value >= 0.5 * a0) g0 = std::max(g0, 2.0 * -pt.control);
    g0 = std::clamp(g0, 1.0, 1e3);

    Eigen::VectorXd init(2);
    init << a0, g0;
    return least_squares(step_lorentzian_model(), series, init);
}

FitResult fit_contrast_saturation(const ScanSeries& series) {
    series.validate();
    FitResult bad;
    bad.param_names = contrast_saturation_model().param_names;
    bad.params = Eigen::VectorXd::Zero(2);
    bad.uncertainties = Eigen::VectorXd::Zero(2);
    bad.covariance = Eigen::MatrixXd::Zero(2, 2);
    if (series.points.size() < 4) {
        bad.message = "need >= 4 points";
        return bad;
    }
    double lo = series.points.front().control;
    double hi = series.points.back().control;
    if (!(lo > 0.0) || hi / lo < 5.0) {
        bad.message = "insufficient intensity dynamic range (need a factor >= 5)";
        return bad;
    }

    double c0 = 0.0;
    for (const auto& pt : series.points) c0 = std::max(c0, pt.value);
    if (c0 <= 0.0) c0 = 1e-3;
    // control closest to the half-extremum value
    double i0 = series.points.back().control;
    double best = 1e300;
    for (const auto& pt : series.points) {
        const double miss = std::abs(pt.value - 0.5 * c0);
        if (miss < best) {
            best = miss;
            i0 = pt.control;
        }
    }

    Eigen::VectorXd init(2);
    init << c0, std::max(i0, 1e-6);
    return least_squares(contrast_saturation_model(), series, init);
}

PowerFitResult fit_power_saturation(const ScanSeries& series) {
    series.validate();
    if (series.points.size() < 4)
        throw std::invalid_argument("power fit needs >= 4 points");

    double pmax0 = 0.0;
    for (const auto& pt : series.points) pmax0 = std::max(pmax0, pt.value);
    if (pmax0 <= 0.0) pmax0 = 1e-15;
    double psat0 = series.points.back().control;
    double best = 1e300;
    for (const auto& pt : series.points) {
        const double miss = std::abs(pt.value - 0.5 * pmax0);
        if (miss < best) {
            best = miss;
            psat0 = pt.control;
        }
    }
    psat0 = std::max(psat0, 1e-18);

    int anchors = 0;
    for (const auto& pt : series.points)
        if (pt.control < 0.5 * psat0) ++anchors;
    if (anchors < 2)
        throw std::invalid_argument("power fit needs >= 2 low-power anchor points (Pin < P_sat/2)");

    Eigen::VectorXd init(2);
    init << pmax0, psat0;
    FitResult base = least_squares(power_saturation_model(), series, init);

    PowerFitResult out;
    static_cast<FitResult&>(out) = base;
    double pm = base.params[0];
    double ps = base.params[1];

    // Physical bound: the low-intensity slope cannot exceed 1 (the ion cannot
    // divert more than is incident on sigma_0). Refit on the boundary if hit.
    if (pm / ps > 1.0 && base.converged) {
        ParametricModel bounded;
        bounded.param_names = {"p_sat"};
        bounded.value = [](const Eigen::VectorXd& p, double pin) {
            return pin / (1.0 + pin / p[0]);
        };
        bounded.gradient = [](const Eigen::VectorXd& p, double pin, Eigen::VectorXd& grad) {
            const double u = pin / p[0];
            grad[0] = u * u / ((1.0 + u) * (1.0 + u));
        };
        Eigen::VectorXd binit(1);
        binit << ps;
        FitResult b = least_squares(bounded, series, binit);
        out.param_names = base.param_names;
        out.params.resize(2);
        out.params << b.params[0], b.params[0];
        out.uncertainties.resize(2);
        out.uncertainties << b.uncertainties[0], b.uncertainties[0];
        out.covariance = Eigen::MatrixXd::Zero(2, 2);
        out.covariance(0, 0) = out.covariance(1, 1) = out.covariance(0, 1) =
            out.covariance(1, 0) = b.covariance(0, 0);
        out.chi2 = b.chi2;
        out.dof = static_cast<int>(series.points.size()) - 1;
        out.converged = b.converged;
        out.message = "slope bound active: " + b.message;
        pm = ps = b.params[0];
    }

    out.slope = pm / ps;
    // var(slope) by linear propagation over (P_max, P_sat)
    const double dpm = 1.0 / ps;
    const double dps = -pm / (ps * ps);
    const double var = dpm * dpm * out.covariance(0, 0) + dps * dps * out.covariance(1, 1) +
                       2.0 * dpm * dps * out.covariance(0, 1);
    out.slope_err = var > 0.0 ? std::sqrt(var) : 0.0;
    return out;
}

namespace {
std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

void write_series_csv(std::ostream& os, const ScanSeries& series) {
    os << "control,value,sigma,flags\n";
    for (const auto& pt : series.points)
        os << format_g17(pt.control) << ',' << format_g17(pt.value) << ','
           << format_g17(pt.sigma) << ',' << to_string(pt.flag) << '\n';
}

ScanSeries read_series_csv(std::istream& is, ScanKind kind) {
    ScanSeries out;
    out.kind = kind;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
    if (line.rfind("control,value,sigma,flags", 0) != 0)
        throw std::invalid_argument("unexpected CSV header: " + line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        ScanPoint pt;
        std::getline(ss, field, ',');
        pt.control = std::stod(field);
        std::getline(ss, field, ',');
        pt.value = std::stod(field);
        std::getline(ss, field, ',');
        pt.sigma = std::stod(field);
        if (std::getline(ss, field, ',')) {
            if (field == "ok") pt.flag = PointFlag::ok;
            else if (field == "non_detection") pt.flag = PointFlag::non_detection;
            else if (field == "fit_failed") pt.flag = PointFlag::fit_failed;
            else throw std::invalid_argument("unknown flag in CSV: " + field);
        }
        out.points.push_back(pt);
    }
    out.validate();
    return out;
}

}  // namespace shadowcast::curvefit
