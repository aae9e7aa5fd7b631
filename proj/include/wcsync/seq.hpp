#pragma once

// Training-sequence construction: Chu-form CAZAC sequences, binary PN
// weights, and the synchronization preambles built from them.

#include "wcsync/types.hpp"

#include <cstdint>
#include <optional>

namespace wcsync::seq {

struct CazacParams {
    std::size_t length = 0;  // L
    std::size_t root = 0;    // r, coprime with L

    // Throws InvalidArgument unless L >= 2, r >= 1 and gcd(r, L) == 1.
    void validate() const;
};

// c(m) = exp(j pi r m^2 / L) for even L. Odd L uses the m(m+1) exponent,
// which is the Chu form that keeps the sequence L-periodic.
CVec cazac_sequence(const CazacParams& params);

// sum_m c(m) conj(c((m + tau) mod L))
cplx periodic_autocorrelation(std::span<const cplx> c, std::size_t tau);

// Binary {-1, +1} weighting sequence. Construction enforces the alphabet and
// rejects constant sequences, which leave the Schmidl-Cox plateau intact.
class PnSequence {
public:
    static PnSequence from_values(std::vector<double> values, std::uint64_t seed = 0);

    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

private:
    PnSequence(std::vector<double> v, std::uint64_t seed) : values_(std::move(v)), seed_(seed) {}
    std::vector<double> values_;
    std::uint64_t seed_ = 0;
};

// Deterministic in (M, seed). Draws from a xorshift64* stream and re-draws
// until |sum p(n)| <= max(0.2 M, M mod 2).
PnSequence pn_sequence(std::size_t length, std::uint64_t seed);

// Places `values` on a `grid_size`-point DFT grid around DC: the first
// ceil(L/2) values on bins 1.., the rest on the top bins ending at grid_size-1.
// DC and the band edges stay zero.
CVec map_centered(std::span<const cplx> values, std::size_t grid_size);
CVec extract_centered(std::span<const cplx> grid, std::size_t count);

struct TrainingSymbol {
    CVec a_half;                    // M samples
    CVec b_half;                    // M samples, pn[n] * a_half[n]
    std::optional<PnSequence> pn;   // empty: unweighted (identical halves)
    CVec cp;                        // last N_cp samples of [a_half b_half]
    CazacParams params;
    std::size_t n = 0;              // N, useful length

    std::size_t half() const noexcept { return n / 2; }
    std::size_t cp_length() const noexcept { return cp.size(); }
    CVec useful() const;            // [a_half b_half]
    CVec with_cp() const;           // [cp a_half b_half]
    // N-point forward DFT of the useful part.
    CVec spectrum() const;
};

// Builds TS = [A_M B_M] where A_M is the M-point inverse DFT (1/M scaled) of
// the length N_sc/2 CAZAC sequence with root r, mapped by map_centered.
// Passing std::nullopt for `pn` builds the unweighted two-identical-halves
// symbol used by the Schmidl-Cox baseline.
TrainingSymbol build_training_symbol(std::size_t n, std::size_t n_sc, std::size_t root,
                                     const std::optional<PnSequence>& pn, std::size_t n_cp);

// [A A -A -A] preamble for Minn's estimator; A is the N/4-point inverse DFT
// of a length N_sc/4 CAZAC sequence.
struct MinnSymbol {
    CVec quarter;
    CVec useful;
    CVec cp;
    std::size_t n = 0;

    CVec with_cp() const;
};

MinnSymbol build_minn_symbol(std::size_t n, std::size_t n_sc, std::size_t root, std::size_t n_cp);

}  // namespace wcsync::seq
