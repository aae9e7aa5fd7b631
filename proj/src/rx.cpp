#include "wcsync/rx.hpp"

#include "wcsync/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace wcsync::rx {

std::size_t required_overlap(const channel::FiberParams& fiber, double sample_rate)
{
    const double spread_s = 2.0 * kPi * std::abs(fiber.beta_s2()) * (sample_rate / 2.0);
    return 2 * static_cast<std::size_t>(std::ceil(spread_s * sample_rate));
}

ComplexSignal cd_equalize_overlap_add(const ComplexSignal& sig, const channel::FiberParams& fiber,
                                      std::size_t block_size, std::size_t overlap)
{
    require(std::has_single_bit(block_size), "FDE block size must be a power of two");
    require(overlap % 2 == 0, "FDE overlap must be even");
    require(overlap < block_size, "FDE overlap must be shorter than the block");
    require(overlap >= required_overlap(fiber, sig.sample_rate),
            "FDE overlap too small for the configured fiber length");
    if (fiber.length_km == 0.0) return sig;

    CVec h(block_size);
    for (std::size_t k = 0; k < block_size; ++k) {
        h[k] = std::conj(channel::cd_response(fiber, fft::bin_frequency(k, block_size, sig.sample_rate),
                                             sig.sample_rate));
    }

    const std::size_t len = sig.size();
    const std::size_t step = block_size - overlap;
    const std::size_t half = overlap / 2;
    CVec out(len, cplx{});
    CVec block(block_size);
    for (std::size_t start = 0; start < len; start += step) {
        const std::size_t count = std::min(step, len - start);
        std::fill(block.begin(), block.end(), cplx{});
        std::copy_n(sig.samples.begin() + static_cast<std::ptrdiff_t>(start), count,
                    block.begin() + static_cast<std::ptrdiff_t>(half));
        CVec spec = fft::forward(block);
        for (std::size_t k = 0; k < block_size; ++k) spec[k] *= h[k];
        const CVec y = fft::inverse(spec);
        for (std::size_t i = 0; i < block_size; ++i) {
            // Output sample i of this block sits at absolute index start - half + i.
            const auto pos = static_cast<std::ptrdiff_t>(start + i) - static_cast<std::ptrdiff_t>(half);
            if (pos >= 0 && static_cast<std::size_t>(pos) < len) out[static_cast<std::size_t>(pos)] += y[i];
        }
    }
    return {std::move(out), sig.sample_rate};
}

ComplexSignal cd_equalize_full(const ComplexSignal& sig, const channel::FiberParams& fiber)
{
    return channel::apply_cd(sig, fiber, /*inverse=*/true);
}

ChannelEstimate estimate_channel(std::span<const cplx> rx_grid, std::span<const cplx> ref_grid,
                                 std::span<const std::size_t> bins, std::size_t source_ts_index)
{
    require(rx_grid.size() == ref_grid.size(), "received and reference grids differ in size");
    ChannelEstimate est;
    est.source_ts_index = source_ts_index;
    est.taps.reserve(bins.size());
    for (auto k : bins) {
        require(k < ref_grid.size(), "data bin outside the grid");
        if (std::abs(ref_grid[k]) < 1e-12) throw EstimationError("reference grid has an empty data bin");
        const cplx tap = rx_grid[k] / ref_grid[k];
        if (!std::isfinite(tap.real()) || !std::isfinite(tap.imag()) || tap == cplx{}) {
            throw EstimationError("channel estimate is zero or non-finite on a data bin");
        }
        est.taps.push_back(tap);
    }
    return est;
}

CVec extract_rf_pilot(const ComplexSignal& sig, const PilotOptions& opts)
{
    const std::size_t n = sig.size();
    require(n > 0, "empty signal");
    // Zero padding keeps the gate from smoothing across the wrap-around,
    // where a residual frequency offset leaves a phase jump.
    const std::size_t nfft = 2 * n;
    CVec padded(nfft, cplx{});
    std::copy(sig.samples.begin(), sig.samples.end(), padded.begin());
    CVec spec = fft::forward(padded);
    const double total = energy(spec);
    for (std::size_t k = 0; k < nfft; ++k) {
        // Hann-shaped gate: a brick wall rings when the pilot sits between bins.
        const double x = std::abs(fft::bin_frequency(k, nfft, sig.sample_rate)) / opts.gate_hz;
        spec[k] *= x < 1.0 ? std::pow(std::cos(0.5 * kPi * x), 2) : 0.0;
    }
    const double gated = energy(spec);
    if (total == 0.0 || gated < total * std::pow(10.0, opts.detection_floor_db / 10.0)) {
        throw EstimationError("RF pilot below the detection floor");
    }
    CVec pilot = fft::inverse(spec);
    pilot.resize(n);
    return pilot;
}

ComplexSignal remove_pilot_phase(const ComplexSignal& sig, std::span<const cplx> pilot)
{
    require(pilot.size() == sig.size(), "pilot and signal differ in length");
    double peak = 0.0;
    for (const auto& v : pilot) peak = std::max(peak, std::abs(v));
    ComplexSignal out = sig;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double mag = std::abs(pilot[i]);
        if (mag > 1e-9 * peak) out.samples[i] *= std::conj(pilot[i]) / mag;
    }
    return out;
}

ComplexSignal rf_pilot_cpe(const ComplexSignal& sig, const PilotOptions& opts)
{
    const CVec pilot = extract_rf_pilot(sig, opts);
    return remove_pilot_phase(sig, pilot);
}

BerReport demodulate_and_count(std::span<const cplx> sig, std::size_t d_hat, const tx::OfdmFrame& frame,
                               const tx::FrameConfig& cfg)
{
    const std::size_t sym_len = cfg.symbol_length();
    const std::size_t slots = frame.layout.size();
    require(slots > 0, "frame has no symbols");
    if (d_hat + (slots - 1) * sym_len + cfg.n > sig.size()) {
        throw InvalidArgument("received buffer shorter than the frame implied by d_hat");
    }

    const auto bins = cfg.data_bins();
    const std::size_t bps = cfg.bits_per_ofdm_symbol();
    BerReport rep;
    std::optional<ChannelEstimate> est;
    std::size_t ts_index = 0;
    std::size_t ds_index = 0;
    double evm_acc = 0.0;
    std::size_t evm_count = 0;

    for (std::size_t slot = 0; slot < slots; ++slot) {
        const auto kind = frame.layout[slot];
        if (kind == tx::SymbolKind::Preamble) continue;
        const std::size_t start = d_hat + slot * sym_len;
        const CVec grid = fft::forward(sig.subspan(start, cfg.n));
        if (kind == tx::SymbolKind::Training) {
            est = estimate_channel(grid, frame.training, bins, ts_index++);
            continue;
        }
        if (!est) throw EstimationError("data symbol precedes any training symbol");
        CVec eq(bins.size());
        const CVec& ref = frame.grid[ds_index];
        for (std::size_t i = 0; i < bins.size(); ++i) {
            eq[i] = grid[bins[i]] / est->taps[i];
            evm_acc += std::norm(eq[i] - ref[bins[i]]);
            ++evm_count;
        }
        const auto bits = tx::qam_demap(eq, cfg.qam_order);
        const auto ref_bits = std::span(frame.tx_bits).subspan(ds_index * bps, bps);
        for (std::size_t i = 0; i < bps; ++i) rep.bit_errors += (bits[i] != ref_bits[i]) ? 1 : 0;
        rep.bits_total += bps;
        ++ds_index;
    }
    require(rep.bits_total > 0, "frame has no data symbols");
    rep.ber = static_cast<double>(rep.bit_errors) / static_cast<double>(rep.bits_total);
    rep.evm_rms = std::sqrt(evm_acc / static_cast<double>(evm_count));
    return rep;
}

}  // namespace wcsync::rx
