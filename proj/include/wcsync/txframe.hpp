#pragma once

// Transmitter: QAM mapping, OFDM modulation and frame assembly
// ([SYN | TS | DS x ds_per_ts | TS | ...]), plus the RF-pilot tone and the
// binary I/Q dump format.

#include "wcsync/seq.hpp"
#include "wcsync/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace wcsync::tx {

using Bits = std::vector<std::uint8_t>;

struct FrameConfig {
    std::size_t n = 512;            // IFFT size
    std::size_t n_sc = 412;         // data subcarriers
    std::size_t n_cp = 46;          // round(0.09 N)
    std::size_t qam_order = 16;
    std::size_t ds_per_ts = 50;     // data symbols per channel-estimation TS
    double sample_rate = 40e9;
    std::optional<double> rf_pilot_psr_db;  // empty: no pilot

    void validate() const;

    std::size_t symbol_length() const noexcept { return n + n_cp; }
    std::size_t bits_per_qam_symbol() const;
    std::size_t bits_per_ofdm_symbol() const { return n_sc * bits_per_qam_symbol(); }
    double subcarrier_spacing() const noexcept { return sample_rate / static_cast<double>(n); }
    // Net payload rate after CP and training-symbol overhead (b/s).
    double net_bit_rate() const;
    // Bin indices of the data subcarriers, in map_centered order.
    std::vector<std::size_t> data_bins() const;
};

std::size_t default_cp_length(std::size_t n);

// Square Gray-labeled QAM with unit average energy. Each axis carries
// log2(order)/2 bits, the first half of a label selects I, the second Q.
// Label 0...0 maps to the (-max, -max) corner.
CVec qam_map(std::span<const std::uint8_t> bits, std::size_t order);
Bits qam_demap(std::span<const cplx> symbols, std::size_t order);

// Inverse DFT (1/N scaled) of one N-bin column, with the last N_cp samples
// prepended. Throws if any DC or guard bin is nonzero.
CVec ofdm_modulate(std::span<const cplx> grid, const FrameConfig& cfg);

// Known channel-estimation grid: a length-N_sc CAZAC sequence (root N_sc - 1)
// on the data bins.
CVec training_grid(const FrameConfig& cfg);

enum class SymbolKind : std::uint8_t { Preamble, Training, Data };

struct OfdmFrame {
    ComplexSignal samples;
    std::size_t sync_start = 0;          // first useful sample of the first preamble symbol
    Bits tx_bits;
    std::vector<CVec> grid;              // N-bin payload grid per data symbol
    CVec training;                       // channel-estimation grid
    std::vector<SymbolKind> layout;      // one entry per OFDM symbol slot

    std::size_t data_symbols() const noexcept { return grid.size(); }
    std::string layout_string() const;
};

Bits random_bits(std::size_t count, std::uint64_t seed);

// `preamble` holds time-domain symbols with CP already attached, each of
// length N + N_cp.
OfdmFrame assemble_frame(std::span<const CVec> preamble, const FrameConfig& cfg,
                         std::span<const std::uint8_t> payload_bits);
OfdmFrame assemble_frame(const seq::TrainingSymbol& ts, const FrameConfig& cfg,
                         std::span<const std::uint8_t> payload_bits);

// Adds a constant (DC) carrier with power psr_db relative to the mean power of
// `samples`. A non-finite negative psr_db disables the pilot.
CVec insert_rf_pilot(std::span<const cplx> samples, double psr_db);

// Binary I/Q dump: a text header of key=value lines terminated by "end\n",
// followed by interleaved little-endian float64 I/Q pairs.
struct SignalDump {
    ComplexSignal signal;
    std::size_t n = 0;
    std::size_t n_cp = 0;
    std::size_t sync_start = 0;
    std::string layout;
};

void write_signal(const std::filesystem::path& path, const SignalDump& dump);
SignalDump read_signal(const std::filesystem::path& path);

}  // namespace wcsync::tx
