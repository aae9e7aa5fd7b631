#include "wcsync/txframe.hpp"

#include "wcsync/fft.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace wcsync::tx {

std::size_t default_cp_length(std::size_t n)
{
    return static_cast<std::size_t>(std::lround(0.09 * static_cast<double>(n)));
}

std::size_t FrameConfig::bits_per_qam_symbol() const
{
    return static_cast<std::size_t>(std::countr_zero(qam_order));
}

void FrameConfig::validate() const
{
    require(n >= 8 && std::has_single_bit(n), "N must be a power of two >= 8");
    require(n_sc >= 2 && n_sc % 2 == 0, "N_sc must be even");
    require(n_sc + 1 <= n, "N_sc + DC must fit in N bins");
    require(n_cp < n, "CP must be shorter than the symbol");
    require(qam_order >= 4 && std::has_single_bit(qam_order) && bits_per_qam_symbol() % 2 == 0,
            "QAM order must be a square power of two (4, 16, 64, ...)");
    require(ds_per_ts >= 1, "ds_per_ts must be >= 1");
    require(sample_rate > 0.0, "sample rate must be positive");
}

double FrameConfig::net_bit_rate() const
{
    const double occupancy = static_cast<double>(n_sc) / static_cast<double>(n);
    const double ts_overhead = 1.0 + 1.0 / static_cast<double>(ds_per_ts);
    const double cp_overhead = 1.0 + static_cast<double>(n_cp) / static_cast<double>(n);
    return sample_rate * static_cast<double>(bits_per_qam_symbol()) * occupancy /
           (ts_overhead * cp_overhead);
}

std::vector<std::size_t> FrameConfig::data_bins() const
{
    const std::size_t pos = (n_sc + 1) / 2;
    const std::size_t neg = n_sc - pos;
    std::vector<std::size_t> bins;
    bins.reserve(n_sc);
    for (std::size_t i = 0; i < pos; ++i) bins.push_back(1 + i);
    for (std::size_t i = 0; i < neg; ++i) bins.push_back(n - neg + i);
    return bins;
}

namespace {

struct AxisLayout {
    std::size_t bits_per_axis;
    std::size_t levels;
    double scale;
};

AxisLayout axis_layout(std::size_t order)
{
    require(order >= 4 && std::has_single_bit(order) && std::countr_zero(order) % 2 == 0,
            "QAM order must be a square power of two");
    const auto k = static_cast<std::size_t>(std::countr_zero(order)) / 2;
    const std::size_t levels = std::size_t{1} << k;
    const double avg_energy = 2.0 * (static_cast<double>(order) - 1.0) / 3.0;
    return {k, levels, 1.0 / std::sqrt(avg_energy)};
}

double axis_level(std::span<const std::uint8_t> label, const AxisLayout& ax)
{
    std::size_t gray = 0;
    for (auto b : label) gray = (gray << 1) | (b & 1u);
    std::size_t bin = gray;
    for (std::size_t s = gray >> 1; s != 0; s >>= 1) bin ^= s;
    return (2.0 * static_cast<double>(bin) - static_cast<double>(ax.levels - 1)) * ax.scale;
}

void axis_bits(double x, const AxisLayout& ax, Bits& out)
{
    const double u = (x / ax.scale + static_cast<double>(ax.levels - 1)) / 2.0;
    const double clamped = std::clamp(std::round(u), 0.0, static_cast<double>(ax.levels - 1));
    const auto bin = static_cast<std::size_t>(clamped);
    const std::size_t gray = bin ^ (bin >> 1);
    for (std::size_t i = ax.bits_per_axis; i-- > 0;) out.push_back(static_cast<std::uint8_t>((gray >> i) & 1u));
}

}  // namespace

CVec qam_map(std::span<const std::uint8_t> bits, std::size_t order)
{
    const AxisLayout ax = axis_layout(order);
    const std::size_t per_symbol = 2 * ax.bits_per_axis;
    require(bits.size() % per_symbol == 0, "bit count must be a multiple of log2(QAM order)");
    CVec out(bits.size() / per_symbol);
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto label = bits.subspan(s * per_symbol, per_symbol);
        out[s] = {axis_level(label.first(ax.bits_per_axis), ax),
                  axis_level(label.last(ax.bits_per_axis), ax)};
    }
    return out;
}

Bits qam_demap(std::span<const cplx> symbols, std::size_t order)
{
    const AxisLayout ax = axis_layout(order);
    Bits out;
    out.reserve(symbols.size() * 2 * ax.bits_per_axis);
    for (const auto& s : symbols) {
        axis_bits(s.real(), ax, out);
        axis_bits(s.imag(), ax, out);
    }
    return out;
}

CVec ofdm_modulate(std::span<const cplx> grid, const FrameConfig& cfg)
{
    require(grid.size() == cfg.n, "grid column must have N bins");
    std::vector<bool> used(cfg.n, false);
    for (auto k : cfg.data_bins()) used[k] = true;
    for (std::size_t k = 0; k < cfg.n; ++k) {
        if (!used[k] && grid[k] != cplx{}) throw InvalidArgument("nonzero DC or guard bin in OFDM grid");
    }
    const CVec body = fft::inverse(grid);
    CVec out(body.end() - static_cast<std::ptrdiff_t>(cfg.n_cp), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

CVec training_grid(const FrameConfig& cfg)
{
    const CVec c = seq::cazac_sequence(seq::CazacParams{cfg.n_sc, cfg.n_sc - 1});
    return seq::map_centered(c, cfg.n);
}

std::string OfdmFrame::layout_string() const
{
    std::ostringstream os;
    std::size_t i = 0;
    bool first = true;
    while (i < layout.size()) {
        std::size_t j = i;
        while (j < layout.size() && layout[j] == layout[i]) ++j;
        if (!first) os << ',';
        first = false;
        const char* name = layout[i] == SymbolKind::Preamble ? "SYN"
                           : layout[i] == SymbolKind::Training ? "TS" : "DS";
        os << name;
        if (j - i > 1) os << '*' << (j - i);
        i = j;
    }
    return os.str();
}

Bits random_bits(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    Bits b(count);
    for (auto& v : b) v = static_cast<std::uint8_t>(gen() >> 63);
    return b;
}

OfdmFrame assemble_frame(std::span<const CVec> preamble, const FrameConfig& cfg,
                         std::span<const std::uint8_t> payload_bits)
{
    cfg.validate();
    require(!preamble.empty(), "frame needs at least one preamble symbol");
    const std::size_t sym_len = cfg.symbol_length();
    for (const auto& p : preamble) require(p.size() == sym_len, "preamble symbol must be N + N_cp samples");
    const std::size_t bps = cfg.bits_per_ofdm_symbol();
    require(!payload_bits.empty() && payload_bits.size() % bps == 0,
            "payload must fill an integer number of data symbols");

    OfdmFrame frame;
    frame.samples.sample_rate = cfg.sample_rate;
    frame.sync_start = cfg.n_cp;
    frame.tx_bits.assign(payload_bits.begin(), payload_bits.end());
    frame.training = training_grid(cfg);

    const std::size_t n_ds = payload_bits.size() / bps;
    const std::size_t n_ts = (n_ds + cfg.ds_per_ts - 1) / cfg.ds_per_ts;
    auto& out = frame.samples.samples;
    out.reserve((preamble.size() + n_ts + n_ds) * sym_len);

    for (const auto& p : preamble) {
        out.insert(out.end(), p.begin(), p.end());
        frame.layout.push_back(SymbolKind::Preamble);
    }

    const CVec ts_samples = ofdm_modulate(frame.training, cfg);
    const auto bins = cfg.data_bins();
    for (std::size_t s = 0; s < n_ds; ++s) {
        if (s % cfg.ds_per_ts == 0) {
            out.insert(out.end(), ts_samples.begin(), ts_samples.end());
            frame.layout.push_back(SymbolKind::Training);
        }
        const CVec symbols = qam_map(payload_bits.subspan(s * bps, bps), cfg.qam_order);
        CVec column(cfg.n, cplx{});
        for (std::size_t i = 0; i < bins.size(); ++i) column[bins[i]] = symbols[i];
        const CVec td = ofdm_modulate(column, cfg);
        out.insert(out.end(), td.begin(), td.end());
        frame.layout.push_back(SymbolKind::Data);
        frame.grid.push_back(std::move(column));
    }
    return frame;
}

OfdmFrame assemble_frame(const seq::TrainingSymbol& ts, const FrameConfig& cfg,
                         std::span<const std::uint8_t> payload_bits)
{
    require(ts.n == cfg.n && ts.cp_length() == cfg.n_cp, "training symbol does not match the frame config");
    const CVec syn = ts.with_cp();
    return assemble_frame(std::span<const CVec>(&syn, 1), cfg, payload_bits);
}

CVec insert_rf_pilot(std::span<const cplx> samples, double psr_db)
{
    CVec out(samples.begin(), samples.end());
    if (!std::isfinite(psr_db) && psr_db < 0) return out;
    require(std::isfinite(psr_db), "pilot-to-signal ratio must be finite or -inf");
    const double amplitude = std::sqrt(mean_power(samples) * std::pow(10.0, psr_db / 10.0));
    for (auto& v : out) v += amplitude;
    return out;
}

namespace {

constexpr const char* kMagic = "WCSYNC-IQ 1";

double to_le(double v)
{
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        auto u = std::bit_cast<std::uint64_t>(v);
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r = (r << 8) | ((u >> (8 * i)) & 0xFF);
        return std::bit_cast<double>(r);
    }
}

}  // namespace

void write_signal(const std::filesystem::path& path, const SignalDump& dump)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    std::ostringstream hdr;
    hdr.precision(17);
    hdr << kMagic << '\n'
        << "sample_rate=" << dump.signal.sample_rate << '\n'
        << "N=" << dump.n << '\n'
        << "N_cp=" << dump.n_cp << '\n'
        << "sync_start=" << dump.sync_start << '\n'
        << "layout=" << dump.layout << '\n'
        << "samples=" << dump.signal.size() << '\n'
        << "end\n";
    const std::string h = hdr.str();
    os.write(h.data(), static_cast<std::streamsize>(h.size()));
    for (const auto& v : dump.signal.samples) {
        const double iq[2] = {to_le(v.real()), to_le(v.imag())};
        os.write(reinterpret_cast<const char*>(iq), sizeof iq);
    }
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

SignalDump read_signal(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    if (line != kMagic) throw std::runtime_error("not a signal dump: " + path.string());

    SignalDump dump;
    std::size_t count = 0;
    bool have_count = false;
    while (std::getline(is, line) && line != "end") {
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("malformed header line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "sample_rate") dump.signal.sample_rate = std::stod(val);
        else if (key == "N") dump.n = std::stoul(val);
        else if (key == "N_cp") dump.n_cp = std::stoul(val);
        else if (key == "sync_start") dump.sync_start = std::stoul(val);
        else if (key == "layout") dump.layout = val;
        else if (key == "samples") { count = std::stoul(val); have_count = true; }
    }
    if (line != "end" || !have_count) throw std::runtime_error("truncated header in " + path.string());

    dump.signal.samples.resize(count);
    for (auto& v : dump.signal.samples) {
        double iq[2];
        is.read(reinterpret_cast<char*>(iq), sizeof iq);
        v = {to_le(iq[0]), to_le(iq[1])};
    }
    if (!is) throw std::runtime_error("truncated sample data in " + path.string());
    return dump;
}

}  // namespace wcsync::tx
