#pragma once

// Linear optical channel: timing delay, CFO, chromatic dispersion, laser
// phase noise, ASE noise at a given OSNR, and ADC quantization.

#include "wcsync/types.hpp"

#include <cstdint>
#include <optional>

namespace wcsync::channel {

// OSNR reference bandwidth: 0.1 nm at 1550 nm.
inline constexpr double kOsnrReferenceBandwidth = 12.5e9;

struct FiberParams {
    double length_km = 0.0;
    double dispersion_ps_nm_km = 16.0;
    double wavelength_nm = 1550.0;

    // Accumulated dispersion coefficient D * lambda^2 * L / c in s^2.
    double beta_s2() const noexcept;
};

// Below this fraction of fs/2 the CD phase is exactly quadratic. Above it the
// group delay rolls smoothly to zero at Nyquist so the sampled all-pass has
// no phase kink at +/- fs/2 and a compact impulse response.
inline constexpr double kCdExactBand = 0.85;

// f^2 for |f| <= kCdExactBand fs/2, smooth even continuation above.
double cd_phase_profile(double f_hz, double sample_rate) noexcept;

// Baseband CD response exp(-j pi D lambda^2 L g(f) / c) with g = cd_phase_profile; all-pass.
cplx cd_response(const FiberParams& fiber, double f_hz, double sample_rate) noexcept;

struct ChannelConfig {
    std::size_t delay_samples = 0;
    double cfo_hz = 0.0;
    std::optional<double> osnr_db;    // empty: no ASE
    FiberParams fiber;
    double linewidth_hz = 0.0;        // combined TX + LO linewidth
    std::optional<int> adc_bits;      // empty: no quantizer
    std::size_t tail_zeros = 0;       // appended after the delay, before CD
    std::uint64_t seed = 1;

    void validate() const;
};

ComplexSignal apply_delay(const ComplexSignal& sig, std::size_t delay);
ComplexSignal append_zeros(const ComplexSignal& sig, std::size_t count);

// output[n] = input[n] exp(j 2 pi cfo n / fs); requires -fs/2 <= cfo < fs/2.
ComplexSignal apply_cfo(const ComplexSignal& sig, double cfo_hz);

// Multiplies by exp(j 2 pi cycles_per_sample n) without range checks.
CVec rotate(std::span<const cplx> x, double cycles_per_sample, double start_index = 0.0);

// Wiener phase noise with per-sample increment variance 2 pi linewidth / fs.
ComplexSignal apply_phase_noise(const ComplexSignal& sig, double linewidth_hz, std::uint64_t seed);

// Full-length DFT filtering with cd_response. `inverse` applies the conjugate.
ComplexSignal apply_cd(const ComplexSignal& sig, const FiberParams& fiber, bool inverse = false);

// Circular complex Gaussian noise of total power
// P_sig / 10^(osnr/10) * fs / 12.5 GHz. P_sig defaults to the mean power of sig.
ComplexSignal add_ase(const ComplexSignal& sig, double osnr_db, std::uint64_t seed,
                      std::optional<double> signal_power = std::nullopt);

// Uniform mid-rise quantizer on I and Q. Full scale defaults to 4 sigma of the
// per-rail amplitude.
ComplexSignal quantize(const ComplexSignal& sig, int bits,
                       std::optional<double> full_scale = std::nullopt);

// delay -> tail zeros -> CFO -> CD -> phase noise -> ASE -> quantize.
// ASE power is referenced to the mean power of the input signal.
ComplexSignal run_channel(const ComplexSignal& sig, const ChannelConfig& cfg);

}  // namespace wcsync::channel
