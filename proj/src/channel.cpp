#include "wcsync/channel.hpp"

#include "wcsync/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wcsync::channel {

double FiberParams::beta_s2() const noexcept
{
    const double d_s_per_m2 = dispersion_ps_nm_km * 1e-6;  // ps/(nm km) -> s/m^2
    const double lambda_m = wavelength_nm * 1e-9;
    const double length_m = length_km * 1e3;
    return d_s_per_m2 * lambda_m * lambda_m * length_m / kSpeedOfLight;
}

namespace {

// C-infinity step from 1 (x <= 0) to 0 (x >= 1).
double smooth_stop(double x) noexcept
{
    if (x <= 0.0) return 1.0;
    if (x >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - x));
    const double b = std::exp(-1.0 / x);
    return a / (a + b);
}

}  // namespace

double cd_phase_profile(double f_hz, double sample_rate) noexcept
{
    const double f = std::abs(f_hz);
    const double nyq = sample_rate / 2.0;
    const double pass = kCdExactBand * nyq;
    if (f <= pass) return f * f;
    // g'(u) = 2 u w(u) with w rolling off smoothly to 0 at Nyquist (Simpson rule).
    const double top = std::min(f, nyq);
    constexpr int kSteps = 64;
    const double h = (top - pass) / kSteps;
    double acc = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
        const double u = pass + i * h;
        const double wgt = (i == 0 || i == kSteps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += wgt * 2.0 * u * smooth_stop((u - pass) / (nyq - pass));
    }
    return pass * pass + acc * h / 3.0;
}

cplx cd_response(const FiberParams& fiber, double f_hz, double sample_rate) noexcept
{
    return std::polar(1.0, -kPi * fiber.beta_s2() * cd_phase_profile(f_hz, sample_rate));
}

void ChannelConfig::validate() const
{
    require(fiber.length_km >= 0.0, "fiber length must be >= 0");
    require(!osnr_db || std::isfinite(*osnr_db), "OSNR must be finite when enabled");
    require(!adc_bits || (*adc_bits >= 1 && *adc_bits <= 16), "ADC resolution must be 1..16 bits");
    require(linewidth_hz >= 0.0, "linewidth must be >= 0");
}

ComplexSignal apply_delay(const ComplexSignal& sig, std::size_t delay)
{
    ComplexSignal out{CVec(delay, cplx{}), sig.sample_rate};
    out.samples.insert(out.samples.end(), sig.samples.begin(), sig.samples.end());
    return out;
}

ComplexSignal append_zeros(const ComplexSignal& sig, std::size_t count)
{
    ComplexSignal out = sig;
    out.samples.resize(sig.size() + count, cplx{});
    return out;
}

CVec rotate(std::span<const cplx> x, double cycles_per_sample, double start_index)
{
    CVec out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        // Reduce to a fraction of a cycle before scaling by 2 pi.
        const double cycles = std::fmod(cycles_per_sample * (start_index + static_cast<double>(n)), 1.0);
        out[n] = x[n] * std::polar(1.0, 2.0 * kPi * cycles);
    }
    return out;
}

ComplexSignal apply_cfo(const ComplexSignal& sig, double cfo_hz)
{
    const double fs = sig.sample_rate;
    require(fs > 0.0, "signal sample rate must be positive");
    require(cfo_hz >= -fs / 2 && cfo_hz < fs / 2, "CFO outside [-fs/2, fs/2) aliases");
    if (cfo_hz == 0.0) return sig;
    return {rotate(sig.samples, cfo_hz / fs), fs};
}

ComplexSignal apply_phase_noise(const ComplexSignal& sig, double linewidth_hz, std::uint64_t seed)
{
    require(linewidth_hz >= 0.0, "linewidth must be >= 0");
    if (linewidth_hz == 0.0) return sig;
    const double sigma = std::sqrt(2.0 * kPi * linewidth_hz / sig.sample_rate);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> step(0.0, sigma);
    ComplexSignal out{CVec(sig.size()), sig.sample_rate};
    double phi = 0.0;
    for (std::size_t n = 0; n < sig.size(); ++n) {
        if (n > 0) phi += step(gen);
        out.samples[n] = sig.samples[n] * std::polar(1.0, phi);
    }
    return out;
}

ComplexSignal apply_cd(const ComplexSignal& sig, const FiberParams& fiber, bool inverse)
{
    if (fiber.length_km == 0.0 || sig.size() == 0) return sig;
    CVec spec = fft::forward(sig.samples);
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k) {
        const cplx h = cd_response(fiber, fft::bin_frequency(k, n, sig.sample_rate), sig.sample_rate);
        spec[k] *= inverse ? std::conj(h) : h;
    }
    return {fft::inverse(spec), sig.sample_rate};
}

ComplexSignal add_ase(const ComplexSignal& sig, double osnr_db, std::uint64_t seed,
                      std::optional<double> signal_power)
{
    require(std::isfinite(osnr_db), "OSNR must be finite");
    const double p_sig = signal_power.value_or(mean_power(sig.samples));
    require(p_sig > 0.0, "cannot reference OSNR to a zero-power signal");
    const double p_noise = p_sig / std::pow(10.0, osnr_db / 10.0) * (sig.sample_rate / kOsnrReferenceBandwidth);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> rail(0.0, std::sqrt(p_noise / 2.0));
    ComplexSignal out = sig;
    for (auto& v : out.samples) {
        const double re = rail(gen);
        const double im = rail(gen);
        v += cplx{re, im};
    }
    return out;
}

ComplexSignal quantize(const ComplexSignal& sig, int bits, std::optional<double> full_scale)
{
    require(bits >= 1 && bits <= 16, "quantizer resolution must be 1..16 bits");
    const double fs_amp = full_scale.value_or(4.0 * std::sqrt(mean_power(sig.samples) / 2.0));
    if (fs_amp <= 0.0) return sig;
    const double levels = std::ldexp(1.0, bits);
    const double step = 2.0 * fs_amp / levels;
    const double lo = -levels / 2;
    const double hi = levels / 2 - 1;
    auto q = [&](double x) {
        const double idx = std::clamp(std::floor(x / step), lo, hi);
        return (idx + 0.5) * step;
    };
    ComplexSignal out{CVec(sig.size()), sig.sample_rate};
    for (std::size_t n = 0; n < sig.size(); ++n) {
        out.samples[n] = {q(sig.samples[n].real()), q(sig.samples[n].imag())};
    }
    return out;
}

namespace {

// Independent sub-seeds for the two random processes of one channel draw.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

ComplexSignal run_channel(const ComplexSignal& sig, const ChannelConfig& cfg)
{
    cfg.validate();
    const double p_sig = mean_power(sig.samples);
    ComplexSignal s = apply_delay(sig, cfg.delay_samples);
    s = append_zeros(s, cfg.tail_zeros);
    s = apply_cfo(s, cfg.cfo_hz);
    s = apply_cd(s, cfg.fiber);
    s = apply_phase_noise(s, cfg.linewidth_hz, derive_seed(cfg.seed, 0));
    if (cfg.osnr_db) s = add_ase(s, *cfg.osnr_db, derive_seed(cfg.seed, 1), p_sig);
    if (cfg.adc_bits) s = quantize(s, *cfg.adc_bits);
    return s;
}

}  // namespace wcsync::channel
