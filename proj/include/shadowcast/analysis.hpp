#ifndef SHADOWCAST_ANALYSIS_HPP
#define SHADOWCAST_ANALYSIS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowcast/image.hpp"
#include "shadowcast/imaging.hpp"

namespace shadowcast::analysis {

// Bandpass applied to an image, recorded so the fitter can push its model
// through the same operator (linear, so parameters stay pre-filter).
struct BandpassSpec {
    double sigma_high = 1.0;  // px, noise-smoothing kernel
    double sigma_low = 20.0;  // px, background-subtraction kernel
};

struct Provenance {
    double exposure = 0.0;
    int binning = 1;
    std::uint64_t signal_seed = 0;
    std::uint64_t reference_seed = 0;
    double pixel_size = 0.0;       // object-plane metres per pixel; 0 = unknown
    double mask_floor = 0.0;       // counts threshold used for masking
};

// Per-pixel contrast map (reference - signal)/reference with validity mask.
struct AbsorptionImage {
    Image2D values;
    std::vector<std::uint8_t> mask;  // 1 = valid
    Provenance provenance;
    std::optional<BandpassSpec> filter;

    int width() const { return values.width; }
    int height() const { return values.height; }
    bool valid(int x, int y) const {
        return mask[static_cast<std::size_t>(y) * values.width + x] != 0;
    }
    std::size_t unmasked_count() const;
};

struct GaussianFit2D {
    double amplitude = 0.0;  // contrast units
    double center_x = 0.0;   // px
    double center_y = 0.0;   // px
    double fwhm_x = 0.0;     // px
    double fwhm_y = 0.0;     // px
    double offset = 0.0;     // baseline (fixed 0 when fitting a filtered image)

    double amplitude_err = 0.0;
    double center_x_err = 0.0;
    double center_y_err = 0.0;
    double fwhm_x_err = 0.0;
    double fwhm_y_err = 0.0;
    double offset_err = 0.0;

    Eigen::MatrixXd covariance;      // over the free parameters, residual-scaled
    std::vector<std::string> param_names;
    bool converged = false;
    double residual_rms = 0.0;       // contrast units, in the fit domain
    int iterations = 0;
    std::string message;
};

// (reference - signal)/reference per pixel; masks pixels whose reference
// counts fall below the floor. Frames must agree in size/binning/exposure.
AbsorptionImage normalize_difference(const imaging::Frame& signal,
                                     const imaging::Frame& reference,
                                     double mask_floor = 100.0);

// Normalized isotropic Gaussian smoothing, sigma = radius px; masked pixels
// are excluded via renormalization (exact 2-D normalized convolution,
// computed separably). radius 0 is the identity.
AbsorptionImage gaussian_blur(const AbsorptionImage& image, double radius);

// blur(r_high) - blur(r_low): removes offsets and slow gradients, keeps
// ~10 px features. Result is tagged with the filter spec.
AbsorptionImage bandpass_filter(const AbsorptionImage& image, double r_high = 1.0,
                                double r_low = 20.0);

// Least-squares fit of offset + A exp(-4 ln2 ((x-x0)^2/wx^2 + (y-y0)^2/wy^2)).
// When the image carries a bandpass record, the model (and its Jacobian) go
// through that same filter, so the returned parameters are pre-filter
// quantities; the offset is then fixed at 0 (it is in the filter null space).
GaussianFit2D fit_gaussian_2d(const AbsorptionImage& image,
                              const std::optional<GaussianFit2D>& init = std::nullopt);

// amplitude / RMS residual in an annulus between 2x and 4x the fitted FWHM.
double image_snr(const AbsorptionImage& image, const GaussianFit2D& fit);

// amplitude * 2 pi sigma_x sigma_y (object plane) * peak intensity.
double diverted_power(const GaussianFit2D& fit, double peak_intensity, double pixel_size);
double diverted_power_err(const GaussianFit2D& fit, double peak_intensity, double pixel_size);

// Synthetic map: offset + A Gaussian on a w x h grid, all pixels valid.
AbsorptionImage synthetic_gaussian(int w, int h, const GaussianFit2D& truth);

}  // namespace shadowcast::analysis

#endif
