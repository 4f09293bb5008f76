#include "shadowcast/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shadowcast/constants.hpp"
#include "shadowcast/rng.hpp"

namespace shadowcast::imaging {

using constants::fwhm_per_sigma;
using constants::ln2;

namespace {
// Substream tags for render_pair
constexpr std::uint64_t kTagSignal = 0x51;
constexpr std::uint64_t kTagReference = 0x52;
constexpr std::uint64_t kTagJitterSignal = 0x53;
constexpr std::uint64_t kTagJitterReference = 0x54;
}  // namespace

double BeamProfile::peak_intensity() const {
    return 4.0 * ln2 * power / (constants::pi * fwhm * fwhm);
}

void BeamProfile::validate() const {
    if (!(power >= 0.0) || !std::isfinite(power)) throw std::invalid_argument("beam power must be >= 0");
    if (!(fwhm > 0.0)) throw std::invalid_argument("beam fwhm must be > 0");
    if (pointing_jitter_rms < 0.0) throw std::invalid_argument("pointing jitter must be >= 0");
}

void ImagingSystem::validate(double lambda) const {
    if (!(na > 0.0 && na < 1.0)) throw std::invalid_argument("na must be in (0, 1)");
    if (!(magnification > 0.0)) throw std::invalid_argument("magnification must be > 0");
    if (!(transmission > 0.0 && transmission <= 1.0))
        throw std::invalid_argument("transmission must be in (0, 1]");
    const double floor = 0.51 * lambda / na - 1e-9;
    if (psf_fwhm < floor)
        throw std::invalid_argument("psf_fwhm below the diffraction floor 0.51 lambda/NA");
    if (etalon) {
        if (!(etalon->amplitude >= 0.0 && etalon->amplitude < 1.0))
            throw std::invalid_argument("etalon amplitude must be in [0, 1)");
        if (!(etalon->period > 0.0)) throw std::invalid_argument("etalon period must be > 0");
    }
}

void CameraModel::validate() const {
    if (!(pixel_pitch > 0.0)) throw std::invalid_argument("pixel_pitch must be > 0");
    if (!(qe > 0.0 && qe <= 1.0)) throw std::invalid_argument("qe must be in (0, 1]");
    if (read_noise < 0.0) throw std::invalid_argument("read_noise must be >= 0");
    if (binning != 1 && binning != 2 && binning != 4 && binning != 8)
        throw std::invalid_argument("binning must be one of {1, 2, 4, 8}");
    if (!(exposure > 0.0)) throw std::invalid_argument("exposure must be > 0");
    if (!(full_well > 0.0)) throw std::invalid_argument("full_well must be > 0");
    if (bit_depth < 8 || bit_depth > 16) throw std::invalid_argument("bit_depth must be 8..16");
}

void IonSpotModel::validate() const {
    if (!(peak_contrast >= 0.0 && peak_contrast <= 1.0))
        throw std::invalid_argument("peak_contrast must be in [0, 1]");
    if (!(fwhm_x > 0.0 && fwhm_y > 0.0)) throw std::invalid_argument("ion spot fwhm must be > 0");
}

void Scene::validate() const {
    transition.validate();
    laser.validate();
    beam.validate();
    imaging.validate(transition.lambda);
    camera.validate();
    ion.validate();
    if (width < 4 || height < 4) throw std::invalid_argument("image must be at least 4x4");
    // Field of view must cover the ion +- 3 spot widths.
    const double d = camera.object_pixel(imaging.magnification);
    const double half_w = 0.5 * width * d;
    const double half_h = 0.5 * height * d;
    if (std::abs(ion.center_x) + 3.0 * ion.fwhm_x > half_w ||
        std::abs(ion.center_y) + 3.0 * ion.fwhm_y > half_h)
        throw std::domain_error("field of view does not cover the ion +- 3 spot widths");
}

double beam_intensity(const BeamProfile& beam, double x, double y) {
    const double dx = x - beam.center_x;
    const double dy = y - beam.center_y;
    return beam.peak_intensity() *
           std::exp(-4.0 * ln2 * (dx * dx + dy * dy) / (beam.fwhm * beam.fwhm));
}

double predict_peak_contrast(const photophysics::TransitionParams& t,
                             const photophysics::LaserParams& laser, double spot_fwhm,
                             double kappa_cal) {
    if (!(spot_fwhm > 0.0)) throw std::invalid_argument("spot_fwhm must be > 0");
    if (!(kappa_cal > 0.0)) throw std::invalid_argument("kappa_cal must be > 0");
    const double sigma = spot_fwhm / fwhm_per_sigma;
    const double c = kappa_cal * photophysics::effective_cross_section(t, laser) /
                     (constants::two_pi * sigma * sigma);
    return std::clamp(c, 0.0, 1.0);
}

double spot_fwhm_model(const photophysics::TransitionParams& t,
                       const photophysics::LaserParams& laser, const ImagingSystem& imaging,
                       double trap_omega, double ion_mass) {
    if (!(trap_omega > 0.0)) throw std::invalid_argument("trap_omega must be > 0");
    if (!(ion_mass > 0.0)) throw std::invalid_argument("ion_mass must be > 0");
    const double temp = photophysics::doppler_temperature(t, laser.detuning, laser.s0(t));
    const double rms = std::sqrt(constants::boltzmann * temp / (ion_mass * trap_omega * trap_omega));
    const double motion_fwhm = fwhm_per_sigma * rms;
    return std::hypot(imaging.psf_fwhm, motion_fwhm);
}

Image2D expected_image(const Scene& scene) {
    scene.validate();
    const double d = scene.camera.object_pixel(scene.imaging.magnification);
    const double pixel_area = d * d;
    const double eph = scene.transition.photon_energy();
    const double to_electrons =
        pixel_area * scene.imaging.transmission * scene.camera.exposure * scene.camera.qe / eph;
    const double contrast = scene.ion.effective_contrast();
    const double cx0 = 0.5 * (scene.width - 1);
    const double cy0 = 0.5 * (scene.height - 1);

    Image2D img(scene.width, scene.height);
    for (int j = 0; j < scene.height; ++j) {
        const double y = (j - cy0) * d;
        for (int i = 0; i < scene.width; ++i) {
            const double x = (i - cx0) * d;
            double intensity = beam_intensity(scene.beam, x, y);
            if (scene.imaging.etalon) {
                const auto& e = *scene.imaging.etalon;
                intensity *= 1.0 + e.amplitude *
                                       std::sin(constants::two_pi * x / e.period + e.phase);
            }
            const double ux = (x - scene.ion.center_x) / scene.ion.fwhm_x;
            const double uy = (y - scene.ion.center_y) / scene.ion.fwhm_y;
            const double dip = contrast * std::exp(-4.0 * ln2 * (ux * ux + uy * uy));
            img.at(i, j) = intensity * (1.0 - dip) * to_electrons;
        }
    }
    return img;
}

Frame render_frame(const Scene& scene, std::uint64_t seed) {
    const Image2D expected = expected_image(scene);
    rng::Xoshiro256pp gen(seed);

    Frame frame;
    frame.width = scene.width;
    frame.height = scene.height;
    frame.maxval = scene.camera.max_count();
    frame.counts.resize(expected.size());
    frame.meta.kind = scene.ion.shelved ? FrameKind::reference : FrameKind::signal;
    frame.meta.seed = seed;
    frame.meta.exposure = scene.camera.exposure;
    frame.meta.binning = scene.camera.binning;
    frame.meta.beam_center_x = scene.beam.center_x;
    frame.meta.beam_center_y = scene.beam.center_y;

    const double gain = scene.camera.gain();
    const double full_well = scene.camera.full_well;
    bool saturated = false;
    for (std::size_t p = 0; p < expected.size(); ++p) {
        double e = static_cast<double>(gen.poisson(expected.v[p]));
        if (e > full_well) {
            e = full_well;
            saturated = true;
        }
        if (scene.camera.read_noise > 0.0) e += gen.normal(0.0, scene.camera.read_noise);
        if (e < 0.0) e = 0.0;
        long long counts = std::llround(e / gain);
        counts = std::clamp<long long>(counts, 0, frame.maxval);
        frame.counts[p] = static_cast<std::uint16_t>(counts);
    }
    frame.meta.saturated = saturated;
    return frame;
}

std::pair<Frame, Frame> render_pair(const Scene& scene, std::uint64_t seed) {
    Scene sig = scene;
    sig.ion.shelved = false;
    Scene ref = scene;
    ref.ion.shelved = true;

    if (scene.beam.pointing_jitter_rms > 0.0) {
        rng::Xoshiro256pp js(rng::substream_seed(seed, kTagJitterSignal));
        sig.beam.center_x += js.normal(0.0, scene.beam.pointing_jitter_rms);
        sig.beam.center_y += js.normal(0.0, scene.beam.pointing_jitter_rms);
        rng::Xoshiro256pp jr(rng::substream_seed(seed, kTagJitterReference));
        ref.beam.center_x += jr.normal(0.0, scene.beam.pointing_jitter_rms);
        ref.beam.center_y += jr.normal(0.0, scene.beam.pointing_jitter_rms);
    }

    Frame signal = render_frame(sig, rng::substream_seed(seed, kTagSignal));
    Frame reference = render_frame(ref, rng::substream_seed(seed, kTagReference));
    return {std::move(signal), std::move(reference)};
}

}  // namespace shadowcast::imaging
