#pragma once

// Receiver after the ADC: overlap-add CD equalization, RF-pilot phase
// tracking, one-tap channel estimation and BER counting.

#include "wcsync/channel.hpp"
#include "wcsync/txframe.hpp"
#include "wcsync/types.hpp"

namespace wcsync::rx {

// Overlap needed to cover the CD impulse spread:
// 2 * ceil(2 pi |D| lambda^2 L (fs/2) / c / Ts).
std::size_t required_overlap(const channel::FiberParams& fiber, double sample_rate);

// Blockwise conj(H(f)) filtering. Each block holds block_size - overlap input
// samples centred between overlap/2 zeros on either side; outputs are added
// back at their original positions.
ComplexSignal cd_equalize_overlap_add(const ComplexSignal& sig, const channel::FiberParams& fiber,
                                      std::size_t block_size, std::size_t overlap);

// Single full-length DFT inverse filter (reference for the blockwise version).
ComplexSignal cd_equalize_full(const ComplexSignal& sig, const channel::FiberParams& fiber);

struct ChannelEstimate {
    CVec taps;                    // one complex tap per data bin, in data_bins() order
    std::size_t source_ts_index = 0;
};

// Zero-forcing taps[k] = rx[bins[k]] / ref[bins[k]].
ChannelEstimate estimate_channel(std::span<const cplx> rx_grid, std::span<const cplx> ref_grid,
                                 std::span<const std::size_t> bins, std::size_t source_ts_index = 0);

struct PilotOptions {
    double gate_hz = 50e6;        // half-width of the Hann-shaped gate around DC
    double detection_floor_db = -20.0;  // gated power relative to total power
};

// Gated DC content: the inverse DFT of sig with every bin outside
// +/- gate_hz zeroed. Throws if it holds less than the detection floor.
CVec extract_rf_pilot(const ComplexSignal& sig, const PilotOptions& opts = {});

// sig[n] * conj(pilot[n]) / |pilot[n]|; samples where the pilot vanishes are kept.
ComplexSignal remove_pilot_phase(const ComplexSignal& sig, std::span<const cplx> pilot);

// extract_rf_pilot followed by remove_pilot_phase.
ComplexSignal rf_pilot_cpe(const ComplexSignal& sig, const PilotOptions& opts = {});

struct BerReport {
    std::size_t bit_errors = 0;
    std::size_t bits_total = 0;
    double ber = 0.0;
    double evm_rms = 0.0;         // over all equalized data subcarriers
};

// Slots of `frame.layout` are taken at d_hat + i (N + N_cp); each training
// slot refreshes the one-tap equalizer used for the data slots after it.
BerReport demodulate_and_count(std::span<const cplx> sig, std::size_t d_hat, const tx::OfdmFrame& frame,
                               const tx::FrameConfig& cfg);

}  // namespace wcsync::rx
