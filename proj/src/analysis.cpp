#include "shadowcast/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "shadowcast/constants.hpp"
#include "shadowcast/lm.hpp"

namespace shadowcast::analysis {

using constants::fwhm_per_sigma;
using constants::ln2;

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int j = -radius; j <= radius; ++j) {
        const double w = std::exp(-0.5 * (j / sigma) * (j / sigma));
        k[static_cast<std::size_t>(j + radius)] = w;
        sum += w;
    }
    for (auto& w : k) w /= sum;
    return k;
}

// Separable convolution with zero padding outside the image.
Image2D conv_separable(const Image2D& in, const std::vector<double>& k) {
    const int radius = (static_cast<int>(k.size()) - 1) / 2;
    Image2D tmp(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            const int lo = std::max(-radius, -x);
            const int hi = std::min(radius, in.width - 1 - x);
            for (int j = lo; j <= hi; ++j)
                acc += k[static_cast<std::size_t>(j + radius)] * in.at(x + j, y);
            tmp.at(x, y) = acc;
        }
    }
    Image2D out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            const int lo = std::max(-radius, -y);
            const int hi = std::min(radius, in.height - 1 - y);
            for (int j = lo; j <= hi; ++j)
                acc += k[static_cast<std::size_t>(j + radius)] * tmp.at(x, y + j);
            out.at(x, y) = acc;
        }
    }
    return out;
}

// Renormalized (masked) blur split into a reusable denominator so the fitter
// can push many model images through the identical operator cheaply.
struct MaskedBlurOp {
    std::vector<double> kernel;
    Image2D den;  // conv(kernel, mask)

    MaskedBlurOp(double sigma, const Image2D& mask_img)
        : kernel(gaussian_kernel(sigma)), den(conv_separable(mask_img, kernel)) {}

    // in must already be zeroed at masked pixels (v * m).
    Image2D apply(const Image2D& in) const {
        Image2D num = conv_separable(in, kernel);
        for (std::size_t p = 0; p < num.v.size(); ++p)
            num.v[p] = den.v[p] > 1e-12 ? num.v[p] / den.v[p] : 0.0;
        return num;
    }
};

Image2D mask_as_image(const AbsorptionImage& img) {
    Image2D m(img.width(), img.height());
    for (std::size_t p = 0; p < m.v.size(); ++p) m.v[p] = img.mask[p] ? 1.0 : 0.0;
    return m;
}

Image2D masked_values(const AbsorptionImage& img) {
    Image2D v = img.values;
    for (std::size_t p = 0; p < v.v.size(); ++p)
        if (!img.mask[p]) v.v[p] = 0.0;
    return v;
}

}  // namespace

std::size_t AbsorptionImage::unmasked_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m != 0;
    return n;
}

AbsorptionImage normalize_difference(const imaging::Frame& signal,
                                     const imaging::Frame& reference, double mask_floor) {
    if (signal.width != reference.width || signal.height != reference.height)
        throw std::invalid_argument("signal/reference dimension mismatch");
    if (signal.meta.binning != reference.meta.binning)
        throw std::invalid_argument("signal/reference binning mismatch");
    if (signal.meta.exposure != reference.meta.exposure)
        throw std::invalid_argument("signal/reference exposure mismatch");

    AbsorptionImage out;
    out.values = Image2D(signal.width, signal.height);
    out.mask.assign(out.values.size(), 0);
    out.provenance.exposure = signal.meta.exposure;
    out.provenance.binning = signal.meta.binning;
    out.provenance.signal_seed = signal.meta.seed;
    out.provenance.reference_seed = reference.meta.seed;
    out.provenance.mask_floor = mask_floor;

    std::size_t valid = 0;
    for (std::size_t p = 0; p < out.values.size(); ++p) {
        const double ref = reference.counts[p];
        if (ref >= mask_floor && ref > 0.0) {
            out.values.v[p] = (ref - signal.counts[p]) / ref;
            out.mask[p] = 1;
            ++valid;
        }
    }
    if (valid == 0) throw std::invalid_argument("fully masked image (reference below floor)");
    return out;
}

AbsorptionImage gaussian_blur(const AbsorptionImage& image, double radius) {
    if (radius < 0.0) throw std::invalid_argument("blur radius must be >= 0");
    if (radius == 0.0) {
        AbsorptionImage out = image;
        out.filter.reset();
        return out;
    }
    MaskedBlurOp op(radius, mask_as_image(image));
    AbsorptionImage out = image;
    out.values = op.apply(masked_values(image));
    out.filter.reset();
    return out;
}

AbsorptionImage bandpass_filter(const AbsorptionImage& image, double r_high, double r_low) {
    if (!(r_high > 0.0) || !(r_high < r_low))
        throw std::invalid_argument("bandpass needs 0 < r_high < r_low");
    if (image.filter)
        throw std::invalid_argument("image already bandpassed");
    const Image2D mask_img = mask_as_image(image);
    MaskedBlurOp high(r_high, mask_img);
    MaskedBlurOp low(r_low, mask_img);
    const Image2D vm = masked_values(image);
    const Image2D a = high.apply(vm);
    const Image2D b = low.apply(vm);

    AbsorptionImage out = image;
    for (std::size_t p = 0; p < out.values.size(); ++p) out.values.v[p] = a.v[p] - b.v[p];
    out.filter = BandpassSpec{r_high, r_low};
    return out;
}

namespace {

struct InitGuess {
    double offset = 0.0, amplitude = 0.0, cx = 0.0, cy = 0.0, fx = 3.0, fy = 3.0;
};

InitGuess auto_init(const AbsorptionImage& img, bool with_offset) {
    InitGuess g;
    const int w = img.width(), h = img.height();

    if (with_offset) {
        std::vector<double> border;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if ((x == 0 || y == 0 || x == w - 1 || y == h - 1) && img.valid(x, y))
                    border.push_back(img.values.at(x, y));
        if (!border.empty()) {
            auto mid = border.begin() + static_cast<std::ptrdiff_t>(border.size() / 2);
            std::nth_element(border.begin(), mid, border.end());
            g.offset = *mid;
        }
    }

    int ex = w / 2, ey = h / 2;
    double best = -1.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (img.valid(x, y)) {
                const double dev = std::abs(img.values.at(x, y) - g.offset);
                if (dev > best) {
                    best = dev;
                    ex = x;
                    ey = y;
                }
            }
    g.amplitude = img.values.at(ex, ey) - g.offset;
    g.cx = ex;
    g.cy = ey;

    // Second moments of the same-signed excess near the extremum.
    const double sign = g.amplitude >= 0.0 ? 1.0 : -1.0;
    const int win = 10;
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
    for (int y = std::max(0, ey - win); y <= std::min(h - 1, ey + win); ++y)
        for (int x = std::max(0, ex - win); x <= std::min(w - 1, ex + win); ++x) {
            if (!img.valid(x, y)) continue;
            const double wgt = std::max(0.0, sign * (img.values.at(x, y) - g.offset));
            sw += wgt;
            sx += wgt * x;
            sy += wgt * y;
        }
    if (sw > 0.0) {
        g.cx = sx / sw;
        g.cy = sy / sw;
        for (int y = std::max(0, ey - win); y <= std::min(h - 1, ey + win); ++y)
            for (int x = std::max(0, ex - win); x <= std::min(w - 1, ex + win); ++x) {
                if (!img.valid(x, y)) continue;
                const double wgt = std::max(0.0, sign * (img.values.at(x, y) - g.offset));
                sxx += wgt * (x - g.cx) * (x - g.cx);
                syy += wgt * (y - g.cy) * (y - g.cy);
            }
        const double lim_x = 0.5 * w, lim_y = 0.5 * h;
        g.fx = std::clamp(fwhm_per_sigma * std::sqrt(sxx / sw), 1.5, lim_x);
        g.fy = std::clamp(fwhm_per_sigma * std::sqrt(syy / sw), 1.5, lim_y);
    }
    return g;
}

// Separable evaluation of the model and its parameter-derivative images.
struct GaussianImages {
    Image2D model;
    std::vector<Image2D> grads;  // per free parameter, same order as params
};

GaussianImages eval_gaussian(int w, int h, bool with_offset, const Eigen::VectorXd& p,
                             bool want_grads) {
    const int base = with_offset ? 1 : 0;
    const double offset = with_offset ? p[0] : 0.0;
    const double a = p[base + 0];
    const double x0 = p[base + 1];
    const double y0 = p[base + 2];
    const double wx = p[base + 3];
    const double wy = p[base + 4];

    std::vector<double> gx(static_cast<std::size_t>(w)), gy(static_cast<std::size_t>(h));
    std::vector<double> dxf(static_cast<std::size_t>(w)), dyf(static_cast<std::size_t>(h));
    std::vector<double> dwxf(static_cast<std::size_t>(w)), dwyf(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
        const double u = (x - x0) / wx;
        gx[static_cast<std::size_t>(x)] = std::exp(-4.0 * ln2 * u * u);
        dxf[static_cast<std::size_t>(x)] = 8.0 * ln2 * (x - x0) / (wx * wx);
        dwxf[static_cast<std::size_t>(x)] = 8.0 * ln2 * (x - x0) * (x - x0) / (wx * wx * wx);
    }
    for (int y = 0; y < h; ++y) {
        const double u = (y - y0) / wy;
        gy[static_cast<std::size_t>(y)] = std::exp(-4.0 * ln2 * u * u);
        dyf[static_cast<std::size_t>(y)] = 8.0 * ln2 * (y - y0) / (wy * wy);
        dwyf[static_cast<std::size_t>(y)] = 8.0 * ln2 * (y - y0) * (y - y0) / (wy * wy * wy);
    }

    GaussianImages out;
    out.model = Image2D(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.model.at(x, y) =
                offset + a * gx[static_cast<std::size_t>(x)] * gy[static_cast<std::size_t>(y)];

    if (!want_grads) return out;
    const int n = base + 5;
    out.grads.assign(static_cast<std::size_t>(n), Image2D(w, h));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double shape =
                gx[static_cast<std::size_t>(x)] * gy[static_cast<std::size_t>(y)];
            const double ashape = a * shape;
            if (with_offset) out.grads[0].at(x, y) = 1.0;
            out.grads[static_cast<std::size_t>(base + 0)].at(x, y) = shape;
            out.grads[static_cast<std::size_t>(base + 1)].at(x, y) =
                ashape * dxf[static_cast<std::size_t>(x)];
            out.grads[static_cast<std::size_t>(base + 2)].at(x, y) =
                ashape * dyf[static_cast<std::size_t>(y)];
            out.grads[static_cast<std::size_t>(base + 3)].at(x, y) =
                ashape * dwxf[static_cast<std::size_t>(x)];
            out.grads[static_cast<std::size_t>(base + 4)].at(x, y) =
                ashape * dwyf[static_cast<std::size_t>(y)];
        }
    return out;
}

}  // namespace

GaussianFit2D fit_gaussian_2d(const AbsorptionImage& image,
                              const std::optional<GaussianFit2D>& init) {
    const int w = image.width(), h = image.height();
    const bool filtered = image.filter.has_value();
    const bool with_offset = !filtered;
    const int n = with_offset ? 6 : 5;

    std::vector<std::pair<int, int>> px;
    px.reserve(image.unmasked_count());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (image.valid(x, y)) px.emplace_back(x, y);
    const int m = static_cast<int>(px.size());
    if (m <= 7) throw std::invalid_argument("need more than 7 unmasked pixels to fit");

    Eigen::VectorXd p0(n);
    if (init) {
        int i = 0;
        if (with_offset) p0[i++] = init->offset;
        p0[i++] = init->amplitude;
        p0[i++] = init->center_x;
        p0[i++] = init->center_y;
        p0[i++] = init->fwhm_x;
        p0[i++] = init->fwhm_y;
    } else {
        const InitGuess g = auto_init(image, with_offset);
        int i = 0;
        if (with_offset) p0[i++] = g.offset;
        p0[i++] = g.amplitude;
        p0[i++] = g.cx;
        p0[i++] = g.cy;
        p0[i++] = g.fx;
        p0[i++] = g.fy;
    }

    // Filter operators bound to the data mask (shared across iterations).
    std::optional<MaskedBlurOp> op_high, op_low;
    Image2D mask_img;
    if (filtered) {
        mask_img = mask_as_image(image);
        op_high.emplace(image.filter->sigma_high, mask_img);
        op_low.emplace(image.filter->sigma_low, mask_img);
    }

    const int base = with_offset ? 1 : 0;
    auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        const double wx = p[base + 3], wy = p[base + 4];
        if (!(wx > 0.05) || !(wy > 0.05) || !p.allFinite()) {
            r.setConstant(std::numeric_limits<double>::quiet_NaN());
            return;
        }
        GaussianImages gi = eval_gaussian(w, h, with_offset, p, J != nullptr);
        if (filtered) {
            auto bp = [&](Image2D& img) {
                for (std::size_t q = 0; q < img.v.size(); ++q)
                    if (!image.mask[q]) img.v[q] = 0.0;
                const Image2D a = op_high->apply(img);
                const Image2D b = op_low->apply(img);
                for (std::size_t q = 0; q < img.v.size(); ++q) img.v[q] = a.v[q] - b.v[q];
            };
            bp(gi.model);
            if (J)
                for (auto& gimg : gi.grads) bp(gimg);
        }
        for (int i = 0; i < m; ++i) {
            const auto [x, y] = px[static_cast<std::size_t>(i)];
            r[i] = gi.model.at(x, y) - image.values.at(x, y);
            if (J)
                for (int c = 0; c < n; ++c)
                    (*J)(i, c) = gi.grads[static_cast<std::size_t>(c)].at(x, y);
        }
    };

    lm::Result lr = lm::minimize(residuals, p0, m);

    GaussianFit2D out;
    out.param_names = with_offset
                          ? std::vector<std::string>{"offset", "amplitude", "center_x",
                                                     "center_y", "fwhm_x", "fwhm_y"}
                          : std::vector<std::string>{"amplitude", "center_x", "center_y",
                                                     "fwhm_x", "fwhm_y"};
    int i = 0;
    if (with_offset) out.offset = lr.params[i++];
    out.amplitude = lr.params[i++];
    out.center_x = lr.params[i++];
    out.center_y = lr.params[i++];
    out.fwhm_x = std::abs(lr.params[i++]);
    out.fwhm_y = std::abs(lr.params[i++]);
    out.converged = lr.converged;
    out.iterations = lr.iterations;
    out.message = lr.message;
    out.residual_rms = std::sqrt(lr.cost / m);

    const int dof = m - n;
    if (lr.converged && dof > 0) {
        const double scale = lr.cost / dof;  // residual variance estimate
        out.covariance = lr.covariance * scale;
        Eigen::VectorXd err = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        int k = 0;
        if (with_offset) out.offset_err = err[k++];
        out.amplitude_err = err[k++];
        out.center_x_err = err[k++];
        out.center_y_err = err[k++];
        out.fwhm_x_err = err[k++];
        out.fwhm_y_err = err[k++];
    } else {
        out.covariance = Eigen::MatrixXd::Zero(n, n);
    }
    return out;
}

double image_snr(const AbsorptionImage& image, const GaussianFit2D& fit) {
    if (!fit.converged) throw std::invalid_argument("image_snr needs a converged fit");
    const double fwhm = 0.5 * (fit.fwhm_x + fit.fwhm_y);
    const double r1 = 2.0 * fwhm, r2 = 4.0 * fwhm;

    double ss = 0.0;
    int count = 0;
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            if (!image.valid(x, y)) continue;
            const double r = std::hypot(x - fit.center_x, y - fit.center_y);
            if (r < r1 || r > r2) continue;
            const double ux = (x - fit.center_x) / fit.fwhm_x;
            const double uy = (y - fit.center_y) / fit.fwhm_y;
            const double model =
                fit.offset + fit.amplitude * std::exp(-4.0 * ln2 * (ux * ux + uy * uy));
            const double res = image.values.at(x, y) - model;
            ss += res * res;
            ++count;
        }
    if (count < 8) throw std::domain_error("annulus (2..4 FWHM) lies outside the image");
    const double rms = std::sqrt(ss / count);
    if (rms <= 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(fit.amplitude) / rms;
}

namespace {
int param_index(const GaussianFit2D& fit, const char* name) {
    for (std::size_t i = 0; i < fit.param_names.size(); ++i)
        if (fit.param_names[i] == name) return static_cast<int>(i);
    return -1;
}
}  // namespace

double diverted_power(const GaussianFit2D& fit, double peak_intensity, double pixel_size) {
    if (!fit.converged) throw std::invalid_argument("diverted_power needs a converged fit");
    if (!(pixel_size > 0.0))
        throw std::invalid_argument("diverted_power needs the object-plane pixel size");
    const double sx = fit.fwhm_x * pixel_size / fwhm_per_sigma;
    const double sy = fit.fwhm_y * pixel_size / fwhm_per_sigma;
    return fit.amplitude * constants::two_pi * sx * sy * peak_intensity;
}

double diverted_power_err(const GaussianFit2D& fit, double peak_intensity, double pixel_size) {
    const double p = diverted_power(fit, peak_intensity, pixel_size);
    const int ia = param_index(fit, "amplitude");
    const int ix = param_index(fit, "fwhm_x");
    const int iy = param_index(fit, "fwhm_y");
    if (ia < 0 || ix < 0 || iy < 0 || fit.covariance.rows() == 0) return 0.0;
    // P = A * c * wx * wy: propagate over (A, wx, wy)
    Eigen::Vector3d g(p / fit.amplitude, p / fit.fwhm_x, p / fit.fwhm_y);
    Eigen::Matrix3d c;
    const int idx[3] = {ia, ix, iy};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) c(r, s) = fit.covariance(idx[r], idx[s]);
    const double var = g.transpose() * c * g;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

AbsorptionImage synthetic_gaussian(int w, int h, const GaussianFit2D& truth) {
    AbsorptionImage img;
    img.values = Image2D(w, h);
    img.mask.assign(img.values.size(), 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double ux = (x - truth.center_x) / truth.fwhm_x;
            const double uy = (y - truth.center_y) / truth.fwhm_y;
            img.values.at(x, y) =
                truth.offset + truth.amplitude * std::exp(-4.0 * ln2 * (ux * ux + uy * uy));
        }
    return img;
}

}  // namespace shadowcast::analysis
