#include "oracles.hpp"
#include "wcsync/txframe.hpp"

#include <doctest.h>

#include <bit>
#include <filesystem>
#include <limits>
#include <fstream>

using namespace wcsync;

namespace {

tx::Bits label_bits(std::size_t label, std::size_t width)
{
    tx::Bits b;
    for (std::size_t i = width; i-- > 0;) b.push_back(static_cast<std::uint8_t>((label >> i) & 1u));
    return b;
}

}  // namespace

TEST_CASE("16-QAM corner label and unit energy")
{
    const CVec s = tx::qam_map(tx::Bits{0, 0, 0, 0}, 16);
    REQUIRE(s.size() == 1);
    const double a = 3.0 / std::sqrt(10.0);
    CHECK(s[0].real() == doctest::Approx(-a));
    CHECK(s[0].imag() == doctest::Approx(-a));

    double acc = 0.0;
    for (std::size_t l = 0; l < 16; ++l) acc += std::norm(tx::qam_map(label_bits(l, 4), 16)[0]);
    CHECK(std::abs(acc / 16.0 - 1.0) < 1e-12);
}

TEST_CASE("QAM demap inverts map and neighbours differ in one bit")
{
    for (std::size_t order : {4u, 16u, 64u}) {
        const std::size_t w = static_cast<std::size_t>(std::countr_zero(order));
        std::vector<cplx> pts;
        for (std::size_t l = 0; l < order; ++l) {
            const auto bits = label_bits(l, w);
            const CVec s = tx::qam_map(bits, order);
            CHECK(tx::qam_demap(s, order) == bits);
            pts.push_back(s[0]);
        }
        // Gray property: nearest neighbours differ in exactly one bit.
        double dmin = 1e9;
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = i + 1; j < order; ++j) dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = i + 1; j < order; ++j)
                if (std::abs(std::abs(pts[i] - pts[j]) - dmin) < 1e-9) CHECK(std::popcount(i ^ j) == 1);
    }
    CHECK_THROWS_AS(tx::qam_map(tx::Bits{0, 1, 0}, 16), InvalidArgument);
    CHECK_THROWS_AS(tx::qam_map(tx::Bits{0, 1, 0, 1}, 8), InvalidArgument);
}

TEST_CASE("frame config defaults and net rate")
{
    tx::FrameConfig cfg;
    CHECK(cfg.n_cp == tx::default_cp_length(512));
    CHECK(cfg.n_cp == 46);
    CHECK(cfg.subcarrier_spacing() == 78.125e6);
    // Exact overheads: 46/512 CP and one training symbol per 50 data symbols.
    const double exact = 40e9 * 4.0 * (412.0 / 512.0) * (512.0 / 558.0) * (50.0 / 51.0);
    CHECK(cfg.net_bit_rate() == doctest::Approx(exact).epsilon(1e-12));
    const double rounded = 40e9 * 4.0 * (412.0 / 512.0) / (1.02 * 1.09);
    CHECK(std::abs(cfg.net_bit_rate() - rounded) < 0.1e9);
    CHECK(std::abs(cfg.net_bit_rate() - 115.8e9) < 0.1e9);

    const auto bins = cfg.data_bins();
    CHECK(bins.size() == 412);
    std::vector<bool> used(512, false);
    for (auto k : bins) used[k] = true;
    CHECK_FALSE(used[0]);
    CHECK(std::count(used.begin(), used.end(), true) == 412);

    tx::FrameConfig bad;
    bad.n_sc = 512;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.n = 500;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("ofdm modulation is an inverse DFT with a cyclic prefix")
{
    tx::FrameConfig cfg;
    CHECK(tx::ofdm_modulate(CVec(512), cfg) == CVec(558));

    const auto bins = cfg.data_bins();
    CVec single(512);
    const std::size_t k = bins[5];
    single[k] = 1.0;
    const CVec y = tx::ofdm_modulate(single, cfg);
    for (std::size_t n = 0; n < 512; ++n) {
        const cplx expect = std::polar(1.0 / 512.0, 2.0 * kPi * static_cast<double>(k * n) / 512.0);
        CHECK(std::abs(y[46 + n] - expect) < 1e-12);
    }
    for (std::size_t i = 0; i < 46; ++i) CHECK(y[i] == y[512 + i]);

    const auto bits = tx::random_bits(cfg.bits_per_ofdm_symbol(), 3);
    const CVec sym = tx::qam_map(bits, 16);
    CVec grid(512);
    for (std::size_t i = 0; i < bins.size(); ++i) grid[bins[i]] = sym[i];
    const CVec td = tx::ofdm_modulate(grid, cfg);
    const CVec useful(td.begin() + 46, td.end());
    CHECK(oracle::max_abs_diff(useful, oracle::idft(grid)) < 1e-12);
    const double parseval = energy(grid) / 512.0;
    CHECK(std::abs(energy(useful) - parseval) / parseval < 1e-9);

    CVec dc = grid;
    dc[0] = 1.0;
    CHECK_THROWS_AS(tx::ofdm_modulate(dc, cfg), InvalidArgument);
    CHECK_THROWS_AS(tx::ofdm_modulate(CVec(256), cfg), InvalidArgument);
}

TEST_CASE("frame layout, length and cyclic prefixes")
{
    tx::FrameConfig cfg;
    const auto ts = seq::build_training_symbol(512, 412, 205, seq::pn_sequence(256, 1), 46);
    const auto bits = tx::random_bits(50 * cfg.bits_per_ofdm_symbol(), 9);
    const auto f = tx::assemble_frame(ts, cfg, bits);
    CHECK(f.samples.size() == 52 * 558);
    CHECK(f.sync_start == 46);
    CHECK(f.data_symbols() == 50);
    REQUIRE(f.layout.size() == 52);
    CHECK(f.layout[0] == tx::SymbolKind::Preamble);
    CHECK(f.layout[1] == tx::SymbolKind::Training);
    CHECK(f.layout[2] == tx::SymbolKind::Data);
    CHECK(f.layout_string().size() > 0);

    for (std::size_t s = 0; s < 52; ++s) {
        const auto base = s * 558;
        for (std::size_t i = 0; i < 46; ++i) CHECK(f.samples.samples[base + i] == f.samples.samples[base + 512 + i]);
    }
    const CVec syn = ts.with_cp();
    CHECK(std::equal(syn.begin(), syn.end(), f.samples.samples.begin()));

    // 120 symbols need three channel-estimation symbols.
    const auto f2 = tx::assemble_frame(ts, cfg, tx::random_bits(120 * cfg.bits_per_ofdm_symbol(), 9));
    CHECK(std::count(f2.layout.begin(), f2.layout.end(), tx::SymbolKind::Training) == 3);
    CHECK(f2.samples.size() == (1 + 3 + 120) * 558);

    CHECK_THROWS_AS(tx::assemble_frame(ts, cfg, tx::Bits(100)), InvalidArgument);
    CHECK_THROWS_AS(tx::assemble_frame(ts, cfg, tx::Bits{}), InvalidArgument);
}

TEST_CASE("random bits are seeded")
{
    CHECK(tx::random_bits(1000, 5) == tx::random_bits(1000, 5));
    CHECK(tx::random_bits(1000, 5) != tx::random_bits(1000, 6));
    const auto b = tx::random_bits(100000, 1);
    const double ones = static_cast<double>(std::count(b.begin(), b.end(), 1));
    CHECK(std::abs(ones / 1e5 - 0.5) < 0.01);
}

TEST_CASE("RF pilot insertion")
{
    const auto bits = tx::random_bits(4 * 412, 11);
    CVec sym = tx::qam_map(bits, 16);
    CHECK(tx::insert_rf_pilot(sym, -std::numeric_limits<double>::infinity()) == sym);

    const double p0 = mean_power(sym);
    cplx mean0{};
    for (const auto& v : sym) mean0 += v;
    mean0 /= static_cast<double>(sym.size());

    const CVec out = tx::insert_rf_pilot(sym, -12.0);
    cplx mean1{};
    for (const auto& v : out) mean1 += v;
    mean1 /= static_cast<double>(out.size());
    const double expected_amp = std::sqrt(p0 * std::pow(10.0, -1.2));
    CHECK(std::abs(std::abs(mean1 - mean0) - expected_amp) / expected_amp < 0.01);

    // Power accounting holds for a zero-mean signal (the OFDM payload has no DC).
    CVec zm = sym;
    for (auto& v : zm) v -= mean0;
    const CVec zo = tx::insert_rf_pilot(zm, -12.0);
    CHECK(std::abs(mean_power(zo) / (mean_power(zm) * (1.0 + std::pow(10.0, -1.2))) - 1.0) < 0.01);
    CHECK_THROWS_AS(tx::insert_rf_pilot(sym, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
}

TEST_CASE("signal dump round trip and malformed files")
{
    const auto dir = std::filesystem::temp_directory_path() / "wcsync_test_dump";
    std::filesystem::create_directories(dir);
    tx::SignalDump d;
    d.signal = {CVec{{1.0, -2.0}, {0.5, 0.25}, {-1e-300, 3e300}}, 40e9};
    d.n = 512;
    d.n_cp = 46;
    d.sync_start = 146;
    d.layout = "P T D";
    const auto path = dir / "a.iq";
    tx::write_signal(path, d);
    const auto r = tx::read_signal(path);
    CHECK(r.signal.samples == d.signal.samples);
    CHECK(r.signal.sample_rate == 40e9);
    CHECK(r.n == 512);
    CHECK(r.n_cp == 46);
    CHECK(r.sync_start == 146);
    CHECK(r.layout == "P T D");

    CHECK_THROWS(tx::read_signal(dir / "missing.iq"));
    {
        std::ofstream os(dir / "junk.iq");
        os << "hello\n";
    }
    CHECK_THROWS(tx::read_signal(dir / "junk.iq"));
    {
        // Header promises more samples than the file holds.
        std::ifstream is(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(is)), {});
        std::ofstream os(dir / "short.iq", std::ios::binary);
        os << all.substr(0, all.size() - 8);
    }
    CHECK_THROWS(tx::read_signal(dir / "short.iq"));
    std::filesystem::remove_all(dir);
}
