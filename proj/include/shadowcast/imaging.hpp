#ifndef SHADOWCAST_IMAGING_HPP
#define SHADOWCAST_IMAGING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shadowcast/image.hpp"
#include "shadowcast/photophysics.hpp"

namespace shadowcast::imaging {

// Gaussian bright-field illumination at the object plane.
struct BeamProfile {
    double power = 15e-9;       // total beam power, W
    double fwhm = 4.8e-6;       // intensity FWHM at focus, m
    double center_x = 0.0;      // object-plane offset, m
    double center_y = 0.0;
    double pointing_jitter_rms = 0.0;  // per-frame, per-axis random center displacement, m

    double peak_intensity() const;  // 4 ln2 P / (pi fwhm^2)
    void validate() const;
};

struct EtalonRipple {
    double amplitude = 0.0;  // fractional modulation depth, [0, 1)
    double period = 2e-6;    // object-plane spatial period, m
    double phase = 0.0;      // rad
};

struct ImagingSystem {
    double na = 0.64;
    double magnification = 615.0;
    double psf_fwhm = 440e-9;   // object-plane PSF FWHM, m
    double transmission = 0.06; // end-to-end power transmission
    std::optional<EtalonRipple> etalon;

    // psf_fwhm may not beat the diffraction floor 0.51 lambda / NA (1 nm tolerance).
    void validate(double lambda) const;
};

struct CameraModel {
    double pixel_pitch = 13e-6;  // sensor pixel size, m
    double qe = 0.35;
    double read_noise = 10.0;    // RMS electrons per binned readout
    int binning = 4;             // one of {1, 2, 4, 8}
    double exposure = 1.0;       // s
    double full_well = 500000.0; // electrons, per binned pixel
    int bit_depth = 16;

    std::uint16_t max_count() const { return static_cast<std::uint16_t>((1u << bit_depth) - 1u); }
    double gain() const { return full_well / max_count(); }  // electrons per count
    double object_pixel(double magnification) const { return pixel_pitch * binning / magnification; }
    void validate() const;
};

struct IonSpotModel {
    double peak_contrast = 0.031;  // [0, 1]
    double fwhm_x = 485e-9;        // object-plane dip FWHM, m
    double fwhm_y = 485e-9;
    double center_x = 0.0;         // m
    double center_y = 0.0;
    bool shelved = false;          // pumped to the metastable dark state

    // Shelving suppresses absorption by 45 dB.
    static constexpr double shelved_suppression = 3.1622776601683794e-5;  // 10^-4.5
    double effective_contrast() const {
        return shelved ? peak_contrast * shelved_suppression : peak_contrast;
    }
    void validate() const;
};

enum class FrameKind { signal, reference };

inline const char* to_string(FrameKind k) { return k == FrameKind::signal ? "signal" : "reference"; }

struct FrameMeta {
    FrameKind kind = FrameKind::signal;
    std::uint64_t seed = 0;
    double exposure = 0.0;
    int binning = 1;
    bool saturated = false;   // full-well clipping occurred somewhere in the frame
    double beam_center_x = 0.0;  // pointing actually used for this frame, m
    double beam_center_y = 0.0;
};

// Raw camera frame, post-binning counts.
struct Frame {
    int width = 0;
    int height = 0;
    std::uint16_t maxval = 65535;
    std::vector<std::uint16_t> counts;
    FrameMeta meta;

    std::uint16_t at(int x, int y) const {
        return counts[static_cast<std::size_t>(y) * width + x];
    }
};

// Everything needed to render one frame. Immutable value type.
struct Scene {
    photophysics::TransitionParams transition;
    photophysics::LaserParams laser;  // intensity at the ion + detuning (predictions)
    BeamProfile beam;
    ImagingSystem imaging;
    CameraModel camera;
    IonSpotModel ion;
    int width = 64;   // binned pixels
    int height = 64;

    void validate() const;
};

// Gaussian beam intensity at object-plane (x, y).
double beam_intensity(const BeamProfile& beam, double x, double y);

// Probability that a photon through the spot centre is absorbed:
// kappa_cal * sigma_eff / (2 pi sigma^2), clamped to [0, 1].
double predict_peak_contrast(const photophysics::TransitionParams& t,
                             const photophysics::LaserParams& laser, double spot_fwhm,
                             double kappa_cal);

// Observed dip width: PSF in quadrature with the thermal motion blur
// sqrt(8 ln2 kB T / (m omega^2)), T from Doppler theory.
double spot_fwhm_model(const photophysics::TransitionParams& t,
                       const photophysics::LaserParams& laser, const ImagingSystem& imaging,
                       double trap_omega, double ion_mass);

// Noiseless expected photoelectrons per binned pixel.
Image2D expected_image(const Scene& scene);

// Stochastic realization: Poisson shot noise + Gaussian read noise,
// full-well clip, ADU quantization. Pure function of (scene, seed).
Frame render_frame(const Scene& scene, std::uint64_t seed);

// Signal (absorbing ion) and reference (shelved ion) with independent noise
// streams derived from seed. Beam pointing identical unless jitter is set.
std::pair<Frame, Frame> render_pair(const Scene& scene, std::uint64_t seed);

}  // namespace shadowcast::imaging

#endif
