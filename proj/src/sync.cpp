#include "wcsync/sync.hpp"

#include "wcsync/channel.hpp"
#include "wcsync/fft.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wcsync::sync {
namespace {

constexpr std::size_t kRefreshInterval = 1024;

// out[d] = sum_{i<w} x[d+i]; the running sum is recomputed exactly every
// kRefreshInterval steps so rounding drift stays bounded on long buffers.
template <class T>
std::vector<T> sliding_sum(std::span<const T> x, std::size_t w)
{
    if (x.size() < w || w == 0) return {};
    const std::size_t count = x.size() - w + 1;
    std::vector<T> out(count);
    auto exact = [&](std::size_t d) {
        T acc{};
        for (std::size_t i = 0; i < w; ++i) acc += x[d + i];
        return acc;
    };
    T acc = exact(0);
    out[0] = acc;
    for (std::size_t d = 1; d < count; ++d) {
        if (d % kRefreshInterval == 0) {
            acc = exact(d);
        } else {
            acc += x[d + w - 1] - x[d - 1];
        }
        out[d] = acc;
    }
    return out;
}

std::vector<double> power_sequence(std::span<const cplx> r)
{
    std::vector<double> e(r.size());
    std::transform(r.begin(), r.end(), e.begin(), [](const cplx& v) { return std::norm(v); });
    return e;
}

// |P|^2 / R^2 with the energy floor applied.
std::vector<double> normalized_metric(std::span<const cplx> p, std::span<const double> r)
{
    const double r_max = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    const double floor = kRelativeEnergyFloor * r_max;
    std::vector<double> m(p.size(), 0.0);
    for (std::size_t d = 0; d < p.size(); ++d) {
        if (r[d] > floor && r[d] > 0.0) m[d] = std::norm(p[d]) / (r[d] * r[d]);
    }
    return m;
}

// c[d] = sum_{n<w.size()} x[d+n] * w[n] for d in [0, x.size() - w.size()],
// evaluated by zero-padded FFT correlation. `w` must be real.
CVec correlate_real_weights(std::span<const cplx> x, std::span<const double> w)
{
    const std::size_t count = x.size() - w.size() + 1;
    const std::size_t size = fft::next_pow2(x.size() + w.size());
    CVec xp(size, cplx{});
    std::copy(x.begin(), x.end(), xp.begin());
    CVec wp(size, cplx{});
    for (std::size_t i = 0; i < w.size(); ++i) wp[i] = w[i];
    CVec xf = fft::forward(xp);
    const CVec wf = fft::forward(wp);
    for (std::size_t k = 0; k < size; ++k) xf[k] *= std::conj(wf[k]);
    CVec c = fft::inverse(xf);
    c.resize(count);
    return c;
}

}  // namespace

TimingTrace timing_metric(std::span<const cplx> r, const seq::PnSequence& pn, std::size_t n)
{
    const std::size_t m = n / 2;
    require(n >= 4 && n % 2 == 0, "symbol length N must be even");
    require(pn.size() == m, "PN length must equal N/2");
    require(r.size() >= n, "signal shorter than one training symbol");

    CVec q(r.size() - m);
    for (std::size_t t = 0; t < q.size(); ++t) q[t] = r[t] * std::conj(r[t + m]);
    CVec p = correlate_real_weights(q, pn.values());
    p.resize(r.size() - n + 1);

    const auto e = power_sequence(r);
    auto rr = sliding_sum<double>(e, n);
    for (auto& v : rr) v *= 0.5;

    return {normalized_metric(p, rr), 0};
}

std::size_t estimate_timing(const TimingTrace& trace)
{
    require(!trace.values.empty(), "empty timing trace");
    const auto it = std::max_element(trace.values.begin(), trace.values.end());
    return trace.window_start + static_cast<std::size_t>(it - trace.values.begin());
}

double estimate_fractional_cfo(std::span<const cplx> r, std::size_t d_hat, const seq::PnSequence& pn,
                               std::size_t m)
{
    require(pn.size() == m, "PN length must equal M");
    require(d_hat + 2 * m <= r.size(), "signal too short for the training symbol at d_hat");
    cplx acc{};
    for (std::size_t i = 0; i < m; ++i) acc += r[d_hat + i] * pn[i] * std::conj(r[d_hat + i + m]);
    if (acc == cplx{}) throw EstimationError("zero half-symbol correlation, CFO phase undefined");
    return -std::arg(acc) / kPi;
}

CVec compensate_cfo(std::span<const cplx> x, double normalized_cfo, double subcarrier_spacing,
                    double sample_rate)
{
    return channel::rotate(x, -normalized_cfo * subcarrier_spacing / sample_rate);
}

IntegerCfo estimate_integer_cfo(std::span<const cplx> rx_ts, std::span<const cplx> ref_spectrum)
{
    const std::size_t n = rx_ts.size();
    require(n == ref_spectrum.size(), "received TS and reference spectrum lengths differ");
    require(n >= 4 && n % 4 == 0, "N must be divisible by 4");
    const CVec rf = fft::forward(rx_ts);
    const double e_ref = energy(ref_spectrum);
    const double e_rx = energy(rf);
    if (e_ref == 0.0 || e_rx == 0.0) throw EstimationError("zero-energy spectrum in integer CFO search");

    // c[s] = sum_k conj(B(k)) R((k + s) mod N), as a circular cross-correlation.
    CVec bf = fft::forward(ref_spectrum);
    const CVec rff = fft::forward(rf);
    for (std::size_t k = 0; k < n; ++k) bf[k] = std::conj(bf[k]) * rff[k];
    const CVec c = fft::inverse(bf);

    const long m = static_cast<long>(n / 2);
    const long nn = static_cast<long>(n);
    IntegerCfo out;
    out.beta_start = -m / 2;
    out.psi.resize(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        const long beta = out.beta_start + i;
        const long s = ((2 * beta) % nn + nn) % nn;
        out.psi[static_cast<std::size_t>(i)] = std::norm(c[static_cast<std::size_t>(s)]) / (e_ref * e_rx);
    }
    const auto it = std::max_element(out.psi.begin(), out.psi.end());
    out.beta_hat = out.beta_start + static_cast<long>(it - out.psi.begin());
    return out;
}

double fold_normalized_cfo(double rho, std::size_t n)
{
    const double nn = static_cast<double>(n);
    const double m = nn / 2;
    return rho - nn * std::floor((rho + m + 0.5) / nn);
}

SyncResult synchronize(std::span<const cplx> r, const seq::TrainingSymbol& ts, const SyncConfig& cfg)
{
    require(ts.pn.has_value(), "proposed synchronizer needs a PN-weighted training symbol");
    require(ts.n == cfg.n, "training symbol length does not match the sync config");
    const std::size_t n = cfg.n;
    const std::size_t m = n / 2;

    SyncResult res;
    res.timing = timing_metric(r, *ts.pn, n);
    res.d_hat = estimate_timing(res.timing);
    res.alpha_hat = estimate_fractional_cfo(r, res.d_hat, *ts.pn, m);

    const double spacing = cfg.subcarrier_spacing();
    const CVec rx_ts = compensate_cfo(r.subspan(res.d_hat, n), res.alpha_hat, spacing, cfg.sample_rate);
    const IntegerCfo ic = estimate_integer_cfo(rx_ts, ts.spectrum());
    res.beta_hat = ic.beta_hat;
    res.psi = ic.psi;
    res.psi_beta_start = ic.beta_start;

    res.rho_hat = fold_normalized_cfo(res.alpha_hat + 2.0 * static_cast<double>(res.beta_hat), n);
    res.cfo_hz_hat = res.rho_hat * spacing;
    return res;
}

TimingTrace sc_timing_metric(std::span<const cplx> r, std::size_t n)
{
    require(n >= 4 && n % 2 == 0, "symbol length N must be even");
    require(r.size() >= n, "signal shorter than one training symbol");
    const std::size_t m = n / 2;
    CVec q(r.size() - m);
    for (std::size_t t = 0; t < q.size(); ++t) q[t] = std::conj(r[t]) * r[t + m];
    auto p = sliding_sum<cplx>(q, m);
    p.resize(r.size() - n + 1);

    const auto e = power_sequence(r);
    const auto half = sliding_sum<double>(e, m);
    std::vector<double> rr(p.size());
    for (std::size_t d = 0; d < rr.size(); ++d) rr[d] = half[d + m];
    return {normalized_metric(p, rr), 0};
}

double sc_fractional_cfo(std::span<const cplx> r, std::size_t d_hat, std::size_t m)
{
    require(d_hat + 2 * m <= r.size(), "signal too short for the training symbol at d_hat");
    cplx acc{};
    for (std::size_t i = 0; i < m; ++i) acc += std::conj(r[d_hat + i]) * r[d_hat + i + m];
    if (acc == cplx{}) throw EstimationError("zero half-symbol correlation, CFO phase undefined");
    return std::arg(acc) / kPi;
}

ScPreamble build_sc_preamble(std::size_t n, std::size_t n_sc, std::size_t root, std::size_t n_cp,
                             std::uint64_t seed)
{
    ScPreamble pre;
    pre.first = seq::build_training_symbol(n, n_sc, root, std::nullopt, n_cp);
    pre.first_grid = fft::forward(pre.first.useful());

    const double e1 = energy(pre.first_grid);
    const double thr = 1e-9 * std::sqrt(e1);
    std::vector<std::size_t> odd_bins;
    const std::size_t half_band = n_sc / 2;
    for (std::size_t k = 1; k <= half_band; ++k) {
        if (std::abs(pre.first_grid[k]) <= thr) odd_bins.push_back(k);
        if (std::abs(pre.first_grid[n - k]) <= thr) odd_bins.push_back(n - k);
    }

    std::mt19937_64 gen(seed);
    auto qpsk = [&] { return std::polar(1.0, kPi * (2.0 * static_cast<double>(gen() >> 62) + 1.0) / 4.0); };
    pre.second_grid.assign(n, cplx{});
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(pre.first_grid[k]) > thr) pre.second_grid[k] = pre.first_grid[k] * qpsk() / std::sqrt(2.0);
    }
    const double odd_amp = odd_bins.empty() ? 0.0 : std::sqrt(e1 / (2.0 * static_cast<double>(odd_bins.size())));
    std::sort(odd_bins.begin(), odd_bins.end());
    for (auto k : odd_bins) pre.second_grid[k] = odd_amp * qpsk();

    const CVec body = fft::inverse(pre.second_grid);
    pre.second_with_cp.assign(body.end() - static_cast<std::ptrdiff_t>(n_cp), body.end());
    pre.second_with_cp.insert(pre.second_with_cp.end(), body.begin(), body.end());
    return pre;
}

ScIntegerCfo sc_integer_cfo(std::span<const cplx> rx_ts1, std::span<const cplx> rx_ts2,
                            std::span<const cplx> grid1, std::span<const cplx> grid2)
{
    const std::size_t n = grid1.size();
    require(!rx_ts2.empty(), "Schmidl-Cox integer CFO needs the second training symbol");
    require(rx_ts1.size() == n && rx_ts2.size() == n && grid2.size() == n,
            "training symbols and grids must all have N samples");
    require(n % 4 == 0, "N must be divisible by 4");
    const CVec y1 = fft::forward(rx_ts1);
    const CVec y2 = fft::forward(rx_ts2);

    const double thr = 1e-9 * std::sqrt(energy(grid1));
    std::vector<std::size_t> bins;
    std::vector<cplx> v;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(grid1[k]) > thr) {
            bins.push_back(k);
            v.push_back(grid2[k] / grid1[k]);
        }
    }
    if (bins.empty()) throw EstimationError("first Schmidl-Cox grid is empty");

    const long m = static_cast<long>(n / 2);
    const long nn = static_cast<long>(n);
    ScIntegerCfo out;
    out.beta_start = -m / 2;
    out.metric.resize(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        const long shift = 2 * (out.beta_start + i);
        cplx acc{};
        double e1 = 0.0;
        double e2 = 0.0;
        for (std::size_t j = 0; j < bins.size(); ++j) {
            const auto k = static_cast<std::size_t>(((static_cast<long>(bins[j]) + shift) % nn + nn) % nn);
            acc += std::conj(y1[k]) * std::conj(v[j]) * y2[k];
            e1 += std::norm(y1[k] * v[j]);
            e2 += std::norm(y2[k]);
        }
        out.metric[static_cast<std::size_t>(i)] = (e1 > 0.0 && e2 > 0.0) ? std::norm(acc) / (e1 * e2) : 0.0;
    }
    const auto it = std::max_element(out.metric.begin(), out.metric.end());
    out.beta_hat = out.beta_start + static_cast<long>(it - out.metric.begin());
    return out;
}

TimingTrace minn_timing_metric(std::span<const cplx> r, std::size_t n)
{
    require(n >= 8 && n % 4 == 0, "Minn metric needs N divisible by 4");
    require(r.size() >= n, "signal shorter than one training symbol");
    const std::size_t q = n / 4;
    CVec prod(r.size() - q);
    for (std::size_t t = 0; t < prod.size(); ++t) prod[t] = std::conj(r[t]) * r[t + q];
    const auto s = sliding_sum<cplx>(prod, q);
    const auto e = sliding_sum<double>(power_sequence(r), q);

    const std::size_t count = r.size() - n + 1;
    constexpr double b[2] = {1.0, 1.0};
    CVec p(count);
    std::vector<double> rr(count);
    for (std::size_t d = 0; d < count; ++d) {
        p[d] = b[0] * s[d] + b[1] * s[d + 2 * q];
        rr[d] = e[d + q] + e[d + 3 * q];
    }
    return {normalized_metric(p, rr), 0};
}

}  // namespace wcsync::sync
