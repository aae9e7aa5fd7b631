#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wcsync {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

// Contiguous block of complex baseband samples tagged with its sample rate.
struct ComplexSignal {
    CVec samples;
    double sample_rate = 0.0;  // Sa/s

    std::size_t size() const noexcept { return samples.size(); }
    std::span<const cplx> view() const noexcept { return samples; }
};

// Thrown when a precondition on the arguments of an operation does not hold.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when an estimator cannot produce a defined output from its input.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidArgument(what);
}

double energy(std::span<const cplx> x) noexcept;
double mean_power(std::span<const cplx> x) noexcept;

}  // namespace wcsync
