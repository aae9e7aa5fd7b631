#pragma once

// Joint timing / CFO synchronization on a PN-weighted CAZAC training symbol,
// and the Schmidl-Cox and Minn baselines.

#include "wcsync/seq.hpp"
#include "wcsync/types.hpp"

#include <cstdint>

namespace wcsync::sync {

// Windows whose energy term falls below this fraction of the largest energy
// term in the buffer are treated as empty and get metric 0.
inline constexpr double kRelativeEnergyFloor = 1e-6;

struct TimingTrace {
    std::vector<double> values;     // metric for d = window_start + i
    std::size_t window_start = 0;
};

struct SyncResult {
    std::size_t d_hat = 0;
    double alpha_hat = 0.0;         // fractional CFO, units of subcarrier spacing
    long beta_hat = 0;              // integer CFO / 2
    double rho_hat = 0.0;           // alpha_hat + 2 beta_hat, folded into [-M - 1/2, M - 1/2)
    double cfo_hz_hat = 0.0;
    TimingTrace timing;
    std::vector<double> psi;        // psi[i] is Psi(beta) for beta = psi_beta_start + i
    long psi_beta_start = 0;
};

struct SyncConfig {
    std::size_t n = 512;
    double sample_rate = 40e9;

    double subcarrier_spacing() const noexcept { return sample_rate / static_cast<double>(n); }
};

// M(d) = |P(d)|^2 / R(d)^2 with
//   P(d) = sum_{n<M} r(d+n) p(n) conj(r(d+n+M))
//   R(d) = 1/2 sum_{k<N} |r(d+k)|^2
// for every d in [0, len - N]. P is evaluated as an FFT cross-correlation of
// r(t) conj(r(t+M)) with p, R as a sliding sum.
TimingTrace timing_metric(std::span<const cplx> r, const seq::PnSequence& pn, std::size_t n);

// Absolute index of the maximum; first index on ties.
std::size_t estimate_timing(const TimingTrace& trace);

// alpha = -angle(sum_n r(d+n) p(n) conj(r(d+n+M))) / pi, in [-1, 1).
double estimate_fractional_cfo(std::span<const cplx> r, std::size_t d_hat, const seq::PnSequence& pn,
                               std::size_t m);

// output[n] = input[n] exp(-j 2 pi cfo_norm spacing n / fs)
CVec compensate_cfo(std::span<const cplx> x, double normalized_cfo, double subcarrier_spacing,
                    double sample_rate);

struct IntegerCfo {
    long beta_hat = 0;
    std::vector<double> psi;
    long beta_start = 0;
};

// Psi(beta) = |sum_k conj(B(k)) R((k + 2 beta) mod N)|^2 / (sum|B|^2 sum|R|^2)
// over beta in [-M/2, M/2 - 1], with R the N-point DFT of rx_ts.
IntegerCfo estimate_integer_cfo(std::span<const cplx> rx_ts, std::span<const cplx> ref_spectrum);

// Folds alpha + 2 beta into the unambiguous interval [-M - 1/2, M - 1/2).
double fold_normalized_cfo(double rho, std::size_t n);

// Timing, fractional CFO, counter-rotation of the training symbol, integer CFO.
// `r` is expected to be CD-compensated already.
SyncResult synchronize(std::span<const cplx> r, const seq::TrainingSymbol& ts, const SyncConfig& cfg);

// --- Schmidl-Cox ---------------------------------------------------------

// P(d) = sum_{n<M} conj(r(d+n)) r(d+n+M), R(d) = sum_{n<M} |r(d+n+M)|^2.
TimingTrace sc_timing_metric(std::span<const cplx> r, std::size_t n);

// angle(P(d_hat)) / pi
double sc_fractional_cfo(std::span<const cplx> r, std::size_t d_hat, std::size_t m);

// Second Schmidl-Cox training symbol: even bins carry the first symbol's
// spectrum times a known random QPSK sequence v(k); odd data bins carry
// random QPSK. Energy matches the first symbol.
struct ScPreamble {
    seq::TrainingSymbol first;
    CVec first_grid;    // N-point DFT of first.useful()
    CVec second_grid;
    CVec second_with_cp;
};

ScPreamble build_sc_preamble(std::size_t n, std::size_t n_sc, std::size_t root, std::size_t n_cp,
                             std::uint64_t seed);

struct ScIntegerCfo {
    long beta_hat = 0;
    std::vector<double> metric;
    long beta_start = 0;
};

// Maximizes |sum_k conj(Y1(k+2b)) conj(v(k)) Y2(k+2b)|^2 (normalized) over
// b in [-M/2, M/2 - 1], with v = X2 / X1 on bins where the first grid is nonzero.
ScIntegerCfo sc_integer_cfo(std::span<const cplx> rx_ts1, std::span<const cplx> rx_ts2,
                            std::span<const cplx> grid1, std::span<const cplx> grid2);

// --- Minn ----------------------------------------------------------------

// Preamble [A A -A -A], Q = N/4:
//   P(d) = sum_{k=0,1} b_k sum_{m<Q} conj(r(d+2kQ+m)) r(d+2kQ+m+Q), b = (+1, +1)
//   R(d) = sum_{k=0,1} sum_{m<Q} |r(d+2kQ+m+Q)|^2
TimingTrace minn_timing_metric(std::span<const cplx> r, std::size_t n);

}  // namespace wcsync::sync
