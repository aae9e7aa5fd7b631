#include "wcsync/seq.hpp"

#include "wcsync/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wcsync::seq {

void CazacParams::validate() const
{
    require(length >= 2, "CAZAC length must be >= 2");
    require(root >= 1, "CAZAC root must be >= 1");
    require(std::gcd(root, length) == 1, "CAZAC root must be coprime with the length");
}

CVec cazac_sequence(const CazacParams& params)
{
    params.validate();
    const std::uint64_t L = params.length;
    const std::uint64_t r = params.root % (2 * L);
    const bool odd = (L % 2) == 1;
    CVec c(L);
    for (std::uint64_t m = 0; m < L; ++m) {
        // Exponent reduced mod 2L in integers keeps the phase exact for large m.
        const std::uint64_t q = odd ? (m * (m + 1)) % (2 * L) : (m * m) % (2 * L);
        const std::uint64_t e = (r * q) % (2 * L);
        c[m] = std::polar(1.0, kPi * static_cast<double>(e) / static_cast<double>(L));
    }
    return c;
}

cplx periodic_autocorrelation(std::span<const cplx> c, std::size_t tau)
{
    const std::size_t L = c.size();
    require(L > 0 && tau < L, "autocorrelation lag must satisfy 0 <= tau < L");
    cplx acc{};
    for (std::size_t m = 0; m < L; ++m) acc += c[m] * std::conj(c[(m + tau) % L]);
    return acc;
}

PnSequence PnSequence::from_values(std::vector<double> values, std::uint64_t seed)
{
    require(values.size() >= 2, "PN sequence length must be >= 2");
    for (double v : values) require(v == 1.0 || v == -1.0, "PN elements must be exactly +1 or -1");
    const bool constant = std::all_of(values.begin(), values.end(),
                                      [&](double v) { return v == values.front(); });
    require(!constant, "constant PN sequence does not remove the timing plateau");
    return PnSequence(std::move(values), seed);
}

namespace {

struct XorShift64Star {
    std::uint64_t state;

    explicit XorShift64Star(std::uint64_t seed)
    {
        // splitmix64 scramble so that small and zero seeds give a usable state.
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        state = z ^ (z >> 31);
        if (state == 0) state = 0x2545F4914F6CDD1DULL;
    }

    std::uint64_t next()
    {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1DULL;
    }
};

}  // namespace

PnSequence pn_sequence(std::size_t length, std::uint64_t seed)
{
    require(length >= 2, "PN sequence length must be >= 2");
    XorShift64Star gen(seed);
    const double bound = std::max(0.2 * static_cast<double>(length),
                                  static_cast<double>(length % 2));
    std::vector<double> v(length);
    for (;;) {
        double sum = 0.0;
        for (auto& x : v) {
            x = (gen.next() >> 63) ? 1.0 : -1.0;
            sum += x;
        }
        if (std::abs(sum) <= bound) break;
    }
    return PnSequence::from_values(std::move(v), seed);
}

CVec map_centered(std::span<const cplx> values, std::size_t grid_size)
{
    const std::size_t L = values.size();
    require(L + 1 <= grid_size, "too many values for the DFT grid (DC must stay empty)");
    const std::size_t pos = (L + 1) / 2;
    const std::size_t neg = L - pos;
    CVec grid(grid_size, cplx{});
    for (std::size_t i = 0; i < pos; ++i) grid[1 + i] = values[i];
    for (std::size_t i = 0; i < neg; ++i) grid[grid_size - neg + i] = values[pos + i];
    return grid;
}

CVec extract_centered(std::span<const cplx> grid, std::size_t count)
{
    const std::size_t G = grid.size();
    require(count + 1 <= G, "too many values requested from the DFT grid");
    const std::size_t pos = (count + 1) / 2;
    const std::size_t neg = count - pos;
    CVec out(count);
    for (std::size_t i = 0; i < pos; ++i) out[i] = grid[1 + i];
    for (std::size_t i = 0; i < neg; ++i) out[pos + i] = grid[G - neg + i];
    return out;
}

CVec TrainingSymbol::useful() const
{
    CVec u;
    u.reserve(a_half.size() + b_half.size());
    u.insert(u.end(), a_half.begin(), a_half.end());
    u.insert(u.end(), b_half.begin(), b_half.end());
    return u;
}

CVec TrainingSymbol::with_cp() const
{
    CVec s = cp;
    s.insert(s.end(), a_half.begin(), a_half.end());
    s.insert(s.end(), b_half.begin(), b_half.end());
    return s;
}

CVec TrainingSymbol::spectrum() const
{
    return fft::forward(useful());
}

namespace {

CVec tail_copy(const CVec& u, std::size_t n_cp)
{
    require(n_cp <= u.size(), "CP longer than the symbol");
    return CVec(u.end() - static_cast<std::ptrdiff_t>(n_cp), u.end());
}

}  // namespace

TrainingSymbol build_training_symbol(std::size_t n, std::size_t n_sc, std::size_t root,
                                     const std::optional<PnSequence>& pn, std::size_t n_cp)
{
    require(n >= 4 && n % 2 == 0, "IFFT size N must be even");
    require(n_sc % 2 == 0 && n_sc <= n, "N_sc must be even and <= N");
    const std::size_t m = n / 2;
    if (pn) require(pn->size() == m, "PN length must equal N/2");

    TrainingSymbol ts;
    ts.n = n;
    ts.params = CazacParams{n_sc / 2, root};
    const CVec c = cazac_sequence(ts.params);
    ts.a_half = fft::inverse(map_centered(c, m));
    ts.b_half = ts.a_half;
    if (pn) {
        for (std::size_t i = 0; i < m; ++i) ts.b_half[i] *= (*pn)[i];
    }
    ts.pn = pn;
    ts.cp = tail_copy(ts.useful(), n_cp);
    return ts;
}

CVec MinnSymbol::with_cp() const
{
    CVec s = cp;
    s.insert(s.end(), useful.begin(), useful.end());
    return s;
}

MinnSymbol build_minn_symbol(std::size_t n, std::size_t n_sc, std::size_t root, std::size_t n_cp)
{
    require(n >= 8 && n % 4 == 0, "Minn preamble needs N divisible by 4");
    require(n_sc % 4 == 0 && n_sc <= n, "N_sc must be divisible by 4 and <= N");
    const std::size_t q = n / 4;
    MinnSymbol s;
    s.n = n;
    const CVec c = cazac_sequence(CazacParams{n_sc / 4, root});
    s.quarter = fft::inverse(map_centered(c, q));
    s.useful.reserve(n);
    const double signs[4] = {1.0, 1.0, -1.0, -1.0};
    for (double sgn : signs) {
        for (const auto& v : s.quarter) s.useful.push_back(sgn * v);
    }
    s.cp = tail_copy(s.useful, n_cp);
    return s;
}

}  // namespace wcsync::seq
