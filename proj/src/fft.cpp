#include "wcsync/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numeric>

namespace wcsync {

double energy(std::span<const cplx> x) noexcept
{
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    return e;
}

double mean_power(std::span<const cplx> x) noexcept
{
    return x.empty() ? 0.0 : energy(x) / static_cast<double>(x.size());
}

namespace fft {
namespace {

// FFTW planning is not thread-safe, execution on new arrays is. Plans are
// created once per (size, direction) with FFTW_UNALIGNED so that
// fftw_execute_dft can run on any std::vector buffer.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, int sign)
    {
        std::lock_guard lock(mu_);
        const auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

CVec execute(std::span<const cplx> x, int sign)
{
    CVec in(x.begin(), x.end());
    CVec out(x.size());
    if (x.empty()) return out;
    fftw_plan plan = cache().get(x.size(), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

}  // namespace

CVec forward(std::span<const cplx> x)
{
    return execute(x, FFTW_FORWARD);
}

CVec inverse(std::span<const cplx> X)
{
    CVec x = execute(X, FFTW_BACKWARD);
    const double scale = X.empty() ? 1.0 : 1.0 / static_cast<double>(X.size());
    for (auto& v : x) v *= scale;
    return x;
}

double bin_frequency(std::size_t k, std::size_t n, double sample_rate) noexcept
{
    const auto kk = static_cast<double>(k);
    const auto nn = static_cast<double>(n);
    const double signed_k = (2 * k < n) ? kk : kk - nn;
    return signed_k * sample_rate / nn;
}

std::size_t next_pow2(std::size_t n) noexcept
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace fft
}  // namespace wcsync
