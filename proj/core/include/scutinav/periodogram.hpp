#pragma once
// scutinav/periodogram.hpp - Lomb-Scargle amplitude spectra and iterative
// prewhitening fits of multi-mode light-curve models.

#include <span>
#include <stdexcept>
#include <vector>

#include "scutinav/lightcurve.hpp"

namespace scutinav::lightcurve {

struct AmplitudeSpectrum {
    double f_min = 0.0; ///< first grid frequency [c/d]
    double df = 0.0;    ///< grid step [c/d]
    std::vector<double> amplitude; ///< sqrt(2 P / n) for Lomb-Scargle power P, the amplitude of a clean sinusoid

    std::size_t size() const { return amplitude.size(); }
    double frequency(std::size_t k) const { return f_min + df * static_cast<double>(k); }
};

/// Lomb-Scargle amplitude spectrum of `values` (mean removed internally) on the
/// uniform grid f_min, f_min + df, ... <= f_max.
AmplitudeSpectrum amplitude_spectrum(std::span<const double> times, std::span<const double> values,
                                     double f_min, double f_max, double df);

/// Peak amplitude over the median amplitude within +-window c/d of the peak,
/// excluding +-exclusion c/d around it.
double peak_snr(const AmplitudeSpectrum& spectrum, std::size_t peak, double window, double exclusion);

struct FitOptions {
    double snr_min = 3.0;     ///< periodogram SNR needed to extract a peak
    double amp_cutoff = 0.01; ///< drop modes below this fraction of the largest amplitude
    double oversample = 10.0; ///< grid step = 1 / (oversample * timespan)
    double noise_window = 5.0; ///< half-width of the local noise window [c/d]
    int max_modes = 24;
    /// Extraction stops once a peak falls below this fraction of the final
    /// amplitude cutoff; such modes could never survive the cutoff.
    double stop_fraction = 0.5;
};

/// No peak reached the SNR threshold on the first pass.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds a StarModel by iterative prewhitening: locate the strongest significant
/// periodogram peak, refit every extracted mode jointly by nonlinear least squares,
/// subtract, repeat; then drop weak modes and refit the survivors. The model epoch
/// is the midpoint of the series.
StarModel fit_model(const PhotometricSeries& series, const LosVector& los, const FitOptions& options = {});

inline StarModel fit_model(const PhotometricSeries& series, double snr_min, double amp_cutoff,
                           const LosVector& los) {
    FitOptions opt;
    opt.snr_min = snr_min;
    opt.amp_cutoff = amp_cutoff;
    return fit_model(series, los, opt);
}

/// Joint nonlinear least-squares refinement of A0 and every (A, f, phi) of `model`
/// against magnitudes `mags` sampled at `times` [days].
void refine_model(StarModel& model, std::span<const double> times, std::span<const double> mags);

} // namespace scutinav::lightcurve
