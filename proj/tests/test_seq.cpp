#include "oracles.hpp"
#include "wcsync/fft.hpp"
#include "wcsync/seq.hpp"

#include <doctest.h>

#include <numeric>

using namespace wcsync;

TEST_CASE("cazac matches the closed form and has ideal periodic autocorrelation")
{
    for (auto [L, r] : {std::pair<std::size_t, std::size_t>{8, 3}, {206, 205}, {256, 255}, {256, 1}, {13, 4}}) {
        CAPTURE(L);
        CAPTURE(r);
        const CVec c = seq::cazac_sequence({L, r});
        const CVec ref = oracle::chu(L, r);
        CHECK(oracle::max_abs_diff(c, ref) < 1e-9);
        for (const auto& v : c) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(seq::periodic_autocorrelation(c, 0)) == doctest::Approx(static_cast<double>(L)));
        double worst = 0.0;
        for (std::size_t tau = 1; tau < L; ++tau) {
            worst = std::max(worst, std::abs(oracle::autocorr(c, tau)));
            CHECK(std::abs(seq::periodic_autocorrelation(c, tau) - oracle::autocorr(c, tau)) < 1e-9);
        }
        CHECK(worst < 1e-7 * static_cast<double>(L));
    }
}

TEST_CASE("cazac(8, 3) lag 3 vanishes")
{
    const CVec c = seq::cazac_sequence({8, 3});
    CHECK(std::abs(seq::periodic_autocorrelation(c, 3)) < 1e-8);
}

TEST_CASE("cazac parameter validation")
{
    CHECK_THROWS_AS(seq::CazacParams({8, 2}).validate(), InvalidArgument);
    CHECK_THROWS_AS(seq::CazacParams({1, 1}).validate(), InvalidArgument);
    CHECK_THROWS_AS(seq::CazacParams({8, 0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(seq::cazac_sequence({206, 2}), InvalidArgument);
    CHECK_NOTHROW(seq::CazacParams({206, 205}).validate());
    const CVec c = seq::cazac_sequence({8, 3});
    CHECK_THROWS_AS(seq::periodic_autocorrelation(c, 8), InvalidArgument);
}

TEST_CASE("pn sequence is deterministic, binary and balanced")
{
    const auto a = seq::pn_sequence(8, 42);
    const auto b = seq::pn_sequence(8, 42);
    CHECK(a.values() == b.values());
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto p = seq::pn_sequence(256, seed);
        REQUIRE(p.size() == 256);
        for (double v : p.values()) CHECK((v == 1.0 || v == -1.0));
        const double sum = std::accumulate(p.values().begin(), p.values().end(), 0.0);
        CHECK(std::abs(sum) <= 0.2 * 256);
    }
    const auto p1 = seq::pn_sequence(256, 1);
    CHECK(std::abs(std::accumulate(p1.values().begin(), p1.values().end(), 0.0)) <= 52);
    CHECK(seq::pn_sequence(256, 1).values() != seq::pn_sequence(256, 2).values());
    CHECK_THROWS_AS(seq::pn_sequence(1, 1), InvalidArgument);
}

TEST_CASE("pn construction rejects bad alphabets and constant sequences")
{
    CHECK_THROWS_AS(seq::PnSequence::from_values({1.0, 0.0, -1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(seq::PnSequence::from_values({1.0, 1.0, 1.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(seq::PnSequence::from_values({-1.0, -1.0}), InvalidArgument);
    CHECK_NOTHROW(seq::PnSequence::from_values({1.0, -1.0, 1.0, 1.0}));
}

TEST_CASE("centered mapping places values symmetrically around an empty DC")
{
    CVec v(6);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(static_cast<double>(i + 1), 0.0);
    const CVec g = seq::map_centered(v, 16);
    CHECK(g[0] == cplx{});
    CHECK(g[1] == v[0]);
    CHECK(g[3] == v[2]);
    CHECK(g[4] == cplx{});
    CHECK(g[13] == v[3]);
    CHECK(g[15] == v[5]);
    for (std::size_t k = 4; k < 13; ++k) CHECK(g[k] == cplx{});
    CHECK(seq::extract_centered(g, 6) == v);
    CHECK_THROWS_AS(seq::map_centered(CVec(16), 16), InvalidArgument);
}

TEST_CASE("training symbol structure at the reference numerology")
{
    const auto pn = seq::pn_sequence(256, 1);
    const auto ts = seq::build_training_symbol(512, 412, 205, pn, 46);
    CHECK(ts.with_cp().size() == 558);
    CHECK(ts.useful().size() == 512);
    REQUIRE(ts.a_half.size() == 256);

    // The M-point DFT of a_half gives back the CAZAC values on the occupied bins.
    const CVec spec = oracle::dft(ts.a_half);
    const CVec expect = seq::map_centered(oracle::chu(206, 205), 256);
    CHECK(oracle::max_abs_diff(spec, expect) < 1e-9);

    // Parseval between the half symbol and its mapped spectrum.
    const double e_time = energy(ts.a_half);
    const double e_freq = energy(expect) / 256.0;
    CHECK(std::abs(e_time - e_freq) / e_freq < 1e-9);

    for (std::size_t i = 0; i < 256; ++i) {
        CHECK(ts.b_half[i] == ts.a_half[i] * pn[i]);
        CHECK(std::abs(ts.b_half[i]) == doctest::Approx(std::abs(ts.a_half[i])).epsilon(1e-15));
    }
    const CVec u = ts.useful();
    for (std::size_t i = 0; i < 46; ++i) CHECK(ts.cp[i] == u[512 - 46 + i]);

    const CVec full = oracle::dft(u);
    CHECK(oracle::max_abs_diff(ts.spectrum(), full) < 1e-9);
}

TEST_CASE("unweighted training symbol has identical halves")
{
    const auto ts = seq::build_training_symbol(512, 412, 205, std::nullopt, 46);
    CHECK_FALSE(ts.pn.has_value());
    CHECK(ts.a_half == ts.b_half);
}

TEST_CASE("training symbol argument checks")
{
    const auto pn = seq::pn_sequence(128, 1);
    CHECK_THROWS_AS(seq::build_training_symbol(512, 412, 205, pn, 46), InvalidArgument);
    CHECK_THROWS_AS(seq::build_training_symbol(512, 412, 2, seq::pn_sequence(256, 1), 46), InvalidArgument);
    CHECK_THROWS_AS(seq::build_training_symbol(512, 413, 205, seq::pn_sequence(256, 1), 46), InvalidArgument);
    CHECK_THROWS_AS(seq::PnSequence::from_values(std::vector<double>(256, 1.0)), InvalidArgument);
}

TEST_CASE("minn preamble has the [A A -A -A] layout")
{
    const auto s = seq::build_minn_symbol(512, 412, 102, 46);
    REQUIRE(s.useful.size() == 512);
    const std::size_t q = 128;
    for (std::size_t i = 0; i < q; ++i) {
        CHECK(s.useful[i] == s.quarter[i]);
        CHECK(s.useful[q + i] == s.quarter[i]);
        CHECK(s.useful[2 * q + i] == -s.quarter[i]);
        CHECK(s.useful[3 * q + i] == -s.quarter[i]);
    }
    CHECK(s.with_cp().size() == 558);
}
