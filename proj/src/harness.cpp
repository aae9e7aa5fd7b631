#include "wcsync/harness.hpp"

#include "wcsync/fft.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace wcsync::harness {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::MetricTrace, "metric_trace"}, {ExperimentKind::TimingStats, "timing_stats"},
    {ExperimentKind::CfoSweep, "cfo_sweep"},       {ExperimentKind::CfoMse, "cfo_mse"},
    {ExperimentKind::BerVsCfo, "ber_vs_cfo"},      {ExperimentKind::BerVsOsnr, "ber_vs_osnr"},
    {ExperimentKind::RangeCheck, "range_check"},
};

const std::vector<std::pair<Algorithm, std::string>> kAlgNames = {
    {Algorithm::Proposed, "proposed"},
    {Algorithm::SchmidlCox, "schmidl_cox"},
    {Algorithm::SchmidlCoxSingle, "schmidl_cox_single"},
    {Algorithm::Minn, "minn"},
};

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

bool is_ber(ExperimentKind k) { return k == ExperimentKind::BerVsCfo || k == ExperimentKind::BerVsOsnr; }

bool grid_is_osnr(ExperimentKind k)
{
    return k == ExperimentKind::TimingStats || k == ExperimentKind::CfoMse || k == ExperimentKind::BerVsOsnr;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::string fmt_num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string to_string(ExperimentKind kind)
{
    for (const auto& [k, s] : kKindNames)
        if (k == kind) return s;
    return "unknown";
}

std::string to_string(Algorithm alg)
{
    for (const auto& [a, s] : kAlgNames)
        if (a == alg) return s;
    return "unknown";
}

ExperimentKind parse_kind(const std::string& name)
{
    for (const auto& [k, s] : kKindNames)
        if (s == name) return k;
    throw InvalidArgument("unknown experiment kind: " + name);
}

Algorithm parse_algorithm(const std::string& name)
{
    for (const auto& [a, s] : kAlgNames)
        if (s == name) return a;
    throw InvalidArgument("unknown algorithm: " + name);
}

// ---------------------------------------------------------------------------

void SystemParams::validate() const
{
    frame.validate();
    require(fiber.length_km >= 0.0, "fiber length must be >= 0");
    require(linewidth_hz >= 0.0, "linewidth must be >= 0");
    require(!adc_bits || (*adc_bits >= 1 && *adc_bits <= 16), "ADC resolution must be 1..16 bits");
    require(std::has_single_bit(fde_block_size), "FDE block size must be a power of two");
    require(overlap() < fde_block_size, "FDE overlap must be shorter than the block");
    require(pilot.gate_hz > 0.0, "pilot gate must be positive");
}

std::size_t SystemParams::overlap() const
{
    return fde_overlap ? fde_overlap : rx::required_overlap(fiber, frame.sample_rate);
}

void Experiment::validate() const
{
    require(!id.empty(), "experiment id must not be empty");
    require(trials >= 1, "trials must be >= 1");
    require(!grid.empty(), "experiment grid must not be empty");
    require(!algorithms.empty(), "experiment needs at least one algorithm");
    require(data_symbols >= 1, "data_symbols must be >= 1");
    for (double g : grid) require(std::isfinite(g), "grid values must be finite");
    const bool cfo_kind = kind == ExperimentKind::CfoSweep || kind == ExperimentKind::CfoMse ||
                          kind == ExperimentKind::RangeCheck;
    for (auto a : algorithms) {
        if (cfo_kind) require(a != Algorithm::Minn, "minn estimates timing only");
        if (is_ber(kind)) require(a == Algorithm::Proposed, "BER experiments run the proposed synchronizer");
    }
    if (kind == ExperimentKind::MetricTrace) {
        for (double g : grid) require(g == 0.0 || g == 1.0 || g == 2.0, "metric_trace conditions are 0, 1, 2");
    }
    if (is_ber(kind)) require(min_bits > 0.0, "min_bits must be positive");
    if (kind == ExperimentKind::BerVsOsnr) require(target_ber > 0.0 && target_ber < 0.5, "target BER out of range");
}

std::string Experiment::grid_param() const
{
    if (kind == ExperimentKind::MetricTrace) return "condition";
    return grid_is_osnr(kind) ? "osnr_db" : "cfo_hz";
}

Experiment default_experiment(ExperimentKind kind)
{
    Experiment e;
    e.id = to_string(kind);
    e.kind = kind;
    const std::vector<double> osnr = {6, 10, 14, 18, 22};
    switch (kind) {
    case ExperimentKind::MetricTrace:
        e.algorithms = {Algorithm::Proposed, Algorithm::SchmidlCox, Algorithm::Minn};
        e.trials = 1;
        e.grid = {0, 1, 2};
        e.osnr_db = 6.0;
        break;
    case ExperimentKind::TimingStats:
        e.algorithms = {Algorithm::Proposed, Algorithm::SchmidlCox, Algorithm::Minn};
        e.grid = osnr;
        break;
    case ExperimentKind::CfoSweep:
        e.algorithms = {Algorithm::Proposed, Algorithm::SchmidlCox, Algorithm::SchmidlCoxSingle};
        e.trials = 20;
        e.grid = linspace(-5e9, 5e9, 21);
        e.osnr_db = 18.0;
        break;
    case ExperimentKind::CfoMse:
        e.algorithms = {Algorithm::Proposed, Algorithm::SchmidlCox};
        e.grid = osnr;
        break;
    case ExperimentKind::BerVsCfo:
        e.algorithms = {Algorithm::Proposed};
        e.trials = 1;
        e.grid = {-5e9, -2.5e9, 0, 2.5e9, 5e9};
        e.osnr_db = 18.0;
        e.data_symbols = 50;
        break;
    case ExperimentKind::BerVsOsnr:
        e.algorithms = {Algorithm::Proposed};
        e.trials = 1;
        e.grid = {14, 16, 18, 20, 22, 24, 26};
        e.data_symbols = 50;
        break;
    case ExperimentKind::RangeCheck:
        e.algorithms = {Algorithm::Proposed};
        e.trials = 1;
        e.grid = {-20e9, 19.921875e9};
        break;
    }
    return e;
}

// --- config ------------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where)
{
    require(obj.is_object(), where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        require(ok, "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out)
{
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename T>
void read_nullable(const json& obj, const char* key, std::optional<T>& out)
{
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) out.reset();
    else out = obj.at(key).get<T>();
}

SystemParams parse_system(const json& j)
{
    reject_unknown(j,
                   {"fft_size", "data_subcarriers", "cp_length", "qam_order", "data_symbols_per_ts", "sample_rate_hz",
                    "cazac_root", "pn_seed", "sc_seed", "fiber_length_km", "dispersion_ps_nm_km", "wavelength_nm",
                    "linewidth_hz", "adc_bits", "delay_samples", "tail_zeros", "fde_block_size", "fde_overlap",
                    "rf_pilot_psr_db", "pilot_gate_hz", "pilot_floor_db"},
                   "system");
    SystemParams s;
    read_opt(j, "fft_size", s.frame.n);
    read_opt(j, "data_subcarriers", s.frame.n_sc);
    s.frame.n_cp = tx::default_cp_length(s.frame.n);
    read_opt(j, "cp_length", s.frame.n_cp);
    read_opt(j, "qam_order", s.frame.qam_order);
    read_opt(j, "data_symbols_per_ts", s.frame.ds_per_ts);
    read_opt(j, "sample_rate_hz", s.frame.sample_rate);
    s.cazac_root = s.frame.n_sc / 2 - 1;
    read_opt(j, "cazac_root", s.cazac_root);
    read_opt(j, "pn_seed", s.pn_seed);
    read_opt(j, "sc_seed", s.sc_seed);
    read_opt(j, "fiber_length_km", s.fiber.length_km);
    read_opt(j, "dispersion_ps_nm_km", s.fiber.dispersion_ps_nm_km);
    read_opt(j, "wavelength_nm", s.fiber.wavelength_nm);
    read_opt(j, "linewidth_hz", s.linewidth_hz);
    read_nullable(j, "adc_bits", s.adc_bits);
    read_opt(j, "delay_samples", s.delay_samples);
    read_opt(j, "tail_zeros", s.tail_zeros);
    read_opt(j, "fde_block_size", s.fde_block_size);
    read_opt(j, "fde_overlap", s.fde_overlap);
    read_opt(j, "rf_pilot_psr_db", s.rf_pilot_psr_db);
    read_opt(j, "pilot_gate_hz", s.pilot.gate_hz);
    read_opt(j, "pilot_floor_db", s.pilot.detection_floor_db);
    s.validate();
    return s;
}

Check parse_check(const json& j)
{
    reject_unknown(j, {"type", "statistic", "algorithm", "rhs_algorithm", "min", "max"}, "check");
    Check c;
    const std::string type = j.at("type").get<std::string>();
    if (type == "bound") c.type = Check::Type::Bound;
    else if (type == "less_than") c.type = Check::Type::LessThan;
    else if (type == "spread_ratio") c.type = Check::Type::SpreadRatio;
    else throw InvalidArgument("unknown check type: " + type);
    c.statistic = j.at("statistic").get<std::string>();
    read_opt(j, "algorithm", c.algorithm);
    read_opt(j, "rhs_algorithm", c.rhs_algorithm);
    read_nullable(j, "min", c.min);
    read_nullable(j, "max", c.max);
    if (c.type == Check::Type::LessThan) require(!c.rhs_algorithm.empty(), "less_than needs rhs_algorithm");
    if (c.type == Check::Type::SpreadRatio) require(c.max.has_value(), "spread_ratio needs max");
    if (c.type == Check::Type::Bound) require(c.min || c.max, "bound needs min or max");
    return c;
}

Experiment parse_experiment(const json& j)
{
    reject_unknown(j,
                   {"id", "kind", "algorithms", "trials", "grid", "cfo_hz", "osnr_db", "data_symbols", "min_bits",
                    "target_ber", "checks"},
                   "experiment");
    Experiment e = default_experiment(parse_kind(j.at("kind").get<std::string>()));
    read_opt(j, "id", e.id);
    if (j.contains("algorithms")) {
        e.algorithms.clear();
        for (const auto& a : j.at("algorithms")) e.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    }
    read_opt(j, "trials", e.trials);
    read_opt(j, "grid", e.grid);
    read_opt(j, "cfo_hz", e.cfo_hz);
    read_nullable(j, "osnr_db", e.osnr_db);
    read_opt(j, "data_symbols", e.data_symbols);
    read_opt(j, "min_bits", e.min_bits);
    read_opt(j, "target_ber", e.target_ber);
    if (j.contains("checks"))
        for (const auto& c : j.at("checks")) e.checks.push_back(parse_check(c));
    e.validate();
    return e;
}

json check_to_json(const Check& c)
{
    static const char* names[] = {"bound", "less_than", "spread_ratio"};
    json j{{"type", names[static_cast<int>(c.type)]}, {"statistic", c.statistic}};
    if (!c.algorithm.empty()) j["algorithm"] = c.algorithm;
    if (!c.rhs_algorithm.empty()) j["rhs_algorithm"] = c.rhs_algorithm;
    if (c.min) j["min"] = *c.min;
    if (c.max) j["max"] = *c.max;
    return j;
}

}  // namespace

Config config_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"seed", "system", "experiments"}, "config");
    Config cfg;
    try {
        read_opt(j, "seed", cfg.seed);
        if (j.contains("system")) cfg.system = parse_system(j.at("system"));
        if (j.contains("experiments"))
            for (const auto& e : j.at("experiments")) cfg.experiments.push_back(parse_experiment(e));
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("bad config value: ") + e.what());
    }
    std::set<std::string> ids;
    for (const auto& e : cfg.experiments) require(ids.insert(e.id).second, "duplicate experiment id: " + e.id);
    return cfg;
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

std::string default_config_json()
{
    const SystemParams s;
    json sys{{"fft_size", s.frame.n},
             {"data_subcarriers", s.frame.n_sc},
             {"cp_length", s.frame.n_cp},
             {"qam_order", s.frame.qam_order},
             {"data_symbols_per_ts", s.frame.ds_per_ts},
             {"sample_rate_hz", s.frame.sample_rate},
             {"cazac_root", s.cazac_root},
             {"pn_seed", s.pn_seed},
             {"sc_seed", s.sc_seed},
             {"fiber_length_km", s.fiber.length_km},
             {"dispersion_ps_nm_km", s.fiber.dispersion_ps_nm_km},
             {"wavelength_nm", s.fiber.wavelength_nm},
             {"linewidth_hz", s.linewidth_hz},
             {"adc_bits", s.adc_bits ? json(*s.adc_bits) : json(nullptr)},
             {"delay_samples", s.delay_samples},
             {"tail_zeros", s.tail_zeros},
             {"fde_block_size", s.fde_block_size},
             {"fde_overlap", s.fde_overlap},
             {"rf_pilot_psr_db", s.rf_pilot_psr_db},
             {"pilot_gate_hz", s.pilot.gate_hz},
             {"pilot_floor_db", s.pilot.detection_floor_db}};
    json exps = json::array();
    for (const auto& [kind, _] : kKindNames) {
        const Experiment e = default_experiment(kind);
        json algs = json::array();
        for (auto a : e.algorithms) algs.push_back(to_string(a));
        json je{{"id", e.id},       {"kind", to_string(e.kind)}, {"algorithms", algs},
                {"trials", e.trials}, {"grid", e.grid},          {"cfo_hz", e.cfo_hz},
                {"data_symbols", e.data_symbols}};
        je["osnr_db"] = e.osnr_db ? json(*e.osnr_db) : json(nullptr);
        if (is_ber(kind)) je["min_bits"] = e.min_bits;
        if (kind == ExperimentKind::BerVsOsnr) je["target_ber"] = e.target_ber;
        json checks = json::array();
        for (const auto& c : e.checks) checks.push_back(check_to_json(c));
        je["checks"] = checks;
        exps.push_back(je);
    }
    return json{{"seed", 1}, {"system", sys}, {"experiments", exps}}.dump(2) + "\n";
}

// --- building blocks -----------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::size_t grid_index,
                         std::size_t trial)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : experiment) h = (h ^ c) * 0x100000001b3ULL;
    std::uint64_t s = mix64(master ^ h);
    s = mix64(s ^ (0x9E3779B97F4A7C15ULL * (grid_index + 1)));
    return mix64(s ^ (0xD1B54A32D192ED03ULL * (trial + 1)));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

Preambles make_preambles(const SystemParams& sys)
{
    const auto& f = sys.frame;
    const auto pn = seq::pn_sequence(f.n / 2, sys.pn_seed);
    return {seq::build_training_symbol(f.n, f.n_sc, sys.cazac_root, pn, f.n_cp),
            sync::build_sc_preamble(f.n, f.n_sc, sys.cazac_root, f.n_cp, sys.sc_seed),
            seq::build_minn_symbol(f.n, f.n_sc, f.n_sc / 4 - 1, f.n_cp)};
}

std::vector<CVec> preamble_for(Algorithm alg, const Preambles& pre)
{
    switch (alg) {
    case Algorithm::Proposed: return {pre.proposed.with_cp()};
    case Algorithm::SchmidlCox: return {pre.schmidl_cox.first.with_cp(), pre.schmidl_cox.second_with_cp};
    case Algorithm::SchmidlCoxSingle: return {pre.schmidl_cox.first.with_cp()};
    case Algorithm::Minn: return {pre.minn.with_cp()};
    }
    throw InvalidArgument("unknown algorithm");
}

channel::ChannelConfig trial_channel(const SystemParams& sys, double cfo_hz, std::optional<double> osnr_db,
                                     std::uint64_t seed)
{
    channel::ChannelConfig ch;
    ch.delay_samples = sys.delay_samples;
    ch.tail_zeros = sys.tail_zeros;
    ch.cfo_hz = cfo_hz;
    ch.fiber = sys.fiber;
    ch.osnr_db = osnr_db;
    ch.linewidth_hz = osnr_db ? sys.linewidth_hz : 0.0;
    ch.adc_bits = osnr_db ? sys.adc_bits : std::nullopt;
    ch.seed = seed;
    return ch;
}

CVec receive(const SystemParams& sys, const ComplexSignal& tx, const channel::ChannelConfig& ch)
{
    const ComplexSignal r = channel::run_channel(tx, ch);
    ComplexSignal eq = rx::cd_equalize_overlap_add(r, sys.fiber, sys.fde_block_size, sys.overlap());
    // The receiver buffer ends with the frame; the appended tail only kept
    // the circular CD model linear.
    eq.samples.resize(ch.delay_samples + tx.size());
    return std::move(eq.samples);
}

SyncOutcome run_sync(Algorithm alg, std::span<const cplx> r, const Preambles& pre, const SystemParams& sys)
{
    const auto& f = sys.frame;
    const std::size_t n = f.n;
    const std::size_t m = n / 2;
    const double spacing = f.subcarrier_spacing();
    SyncOutcome out;
    switch (alg) {
    case Algorithm::Proposed: {
        auto res = sync::synchronize(r, pre.proposed, {n, f.sample_rate});
        out.d_hat = res.d_hat;
        out.cfo_hz = res.cfo_hz_hat;
        out.beta_hat = res.beta_hat;
        out.trace = std::move(res.timing);
        break;
    }
    case Algorithm::SchmidlCox:
    case Algorithm::SchmidlCoxSingle: {
        out.trace = sync::sc_timing_metric(r, n);
        out.d_hat = sync::estimate_timing(out.trace);
        const double alpha = sync::sc_fractional_cfo(r, out.d_hat, m);
        if (alg == Algorithm::SchmidlCoxSingle) {
            out.cfo_hz = alpha * spacing;
            break;
        }
        const std::size_t second = out.d_hat + f.symbol_length();
        if (second + n > r.size()) throw EstimationError("second Schmidl-Cox symbol runs past the buffer");
        const CVec ts1 = sync::compensate_cfo(r.subspan(out.d_hat, n), alpha, spacing, f.sample_rate);
        const CVec ts2 = sync::compensate_cfo(r.subspan(second, n), alpha, spacing, f.sample_rate);
        const auto ic = sync::sc_integer_cfo(ts1, ts2, pre.schmidl_cox.first_grid, pre.schmidl_cox.second_grid);
        out.beta_hat = ic.beta_hat;
        out.cfo_hz = sync::fold_normalized_cfo(alpha + 2.0 * static_cast<double>(ic.beta_hat), n) * spacing;
        break;
    }
    case Algorithm::Minn:
        out.trace = sync::minn_timing_metric(r, n);
        out.d_hat = sync::estimate_timing(out.trace);
        break;
    }
    return out;
}

namespace {

tx::OfdmFrame make_frame(const SystemParams& sys, const std::vector<CVec>& preamble, std::size_t data_symbols,
                         std::uint64_t seed)
{
    const auto bits = tx::random_bits(data_symbols * sys.frame.bits_per_ofdm_symbol(), mix64(seed ^ 0xB175ULL));
    return tx::assemble_frame(preamble, sys.frame, bits);
}

}  // namespace

SyncTrial run_sync_trial(Algorithm alg, const SystemParams& sys, const Preambles& pre, double cfo_hz,
                         std::optional<double> osnr_db, std::size_t data_symbols, std::uint64_t seed)
{
    const auto frame = make_frame(sys, preamble_for(alg, pre), data_symbols, seed);
    const auto ch = trial_channel(sys, cfo_hz, osnr_db, seed);
    const CVec r = receive(sys, frame.samples, ch);
    const auto out = run_sync(alg, r, pre, sys);
    SyncTrial t;
    t.timing_error = static_cast<long>(out.d_hat) - static_cast<long>(ch.delay_samples + frame.sync_start);
    t.cfo_hz_hat = out.cfo_hz;
    t.beta_hat = out.beta_hat;
    return t;
}

rx::BerReport run_ber_trial(const SystemParams& sys, const Preambles& pre, double cfo_hz,
                            std::optional<double> osnr_db, std::size_t data_symbols, std::uint64_t seed)
{
    auto frame = make_frame(sys, preamble_for(Algorithm::Proposed, pre), data_symbols, seed);
    ComplexSignal tx_sig = frame.samples;
    tx_sig.samples = tx::insert_rf_pilot(frame.samples.samples, sys.rf_pilot_psr_db);
    const auto ch = trial_channel(sys, cfo_hz, osnr_db, seed);
    const CVec r = receive(sys, tx_sig, ch);

    const auto& f = sys.frame;
    const auto res = sync::synchronize(r, pre.proposed, {f.n, f.sample_rate});
    ComplexSignal corrected{sync::compensate_cfo(r, res.rho_hat, f.subcarrier_spacing(), f.sample_rate),
                            f.sample_rate};
    // The synchronization preamble has DC content of its own; blank it so it
    // does not leak into the pilot estimate around the training symbol.
    ComplexSignal blanked = corrected;
    const std::size_t pre_begin = res.d_hat >= f.n_cp ? res.d_hat - f.n_cp : 0;
    const std::size_t pre_end = std::min(blanked.size(), res.d_hat + f.n);
    std::fill(blanked.samples.begin() + static_cast<std::ptrdiff_t>(pre_begin),
              blanked.samples.begin() + static_cast<std::ptrdiff_t>(pre_end), cplx{});
    corrected = rx::remove_pilot_phase(corrected, rx::extract_rf_pilot(blanked, sys.pilot));
    return rx::demodulate_and_count(corrected.samples, res.d_hat, frame, f);
}

std::optional<double> osnr_at_ber(std::span<const double> osnr_db, std::span<const double> ber, double target)
{
    require(osnr_db.size() == ber.size(), "OSNR and BER arrays differ in length");
    const double lt = std::log10(target);
    for (std::size_t i = 0; i + 1 < osnr_db.size(); ++i) {
        const double b0 = ber[i];
        const double b1 = ber[i + 1];
        if (b0 <= 0.0 || b1 <= 0.0) continue;
        const double l0 = std::log10(b0);
        const double l1 = std::log10(b1);
        if ((l0 - lt) * (l1 - lt) > 0.0) continue;
        if (l0 == l1) return osnr_db[i];
        return osnr_db[i] + (lt - l0) / (l1 - l0) * (osnr_db[i + 1] - osnr_db[i]);
    }
    return std::nullopt;
}

std::vector<ResultRow> rate_rows(const SystemParams& sys)
{
    sys.frame.validate();
    return {
        {"rate", "system", "none", 0.0, "net_bit_rate_gbps", sys.frame.net_bit_rate() / 1e9, 1},
        {"rate", "system", "none", 0.0, "subcarrier_spacing_hz", sys.frame.subcarrier_spacing(), 1},
    };
}

// --- experiments ----------------------------------------------------------------

namespace {

struct Ctx {
    const Experiment& exp;
    const SystemParams& sys;
    const Preambles& pre;
    std::uint64_t master;
    unsigned threads;
    std::string gp;

    ResultRow row(const std::string& alg, double g, const std::string& stat, double v, std::size_t n) const
    {
        return {exp.id, alg, gp, g, stat, v, n};
    }
};

std::size_t longest_run_containing(const std::vector<double>& v, std::size_t idx, double thr)
{
    std::size_t lo = idx;
    std::size_t hi = idx;
    while (lo > 0 && v[lo - 1] >= thr) --lo;
    while (hi + 1 < v.size() && v[hi + 1] >= thr) ++hi;
    return hi - lo + 1;
}

void run_metric_trace(const Ctx& c, ExperimentResult& out)
{
    const auto& f = c.sys.frame;
    for (std::size_t gi = 0; gi < c.exp.grid.size(); ++gi) {
        const int cond = static_cast<int>(c.exp.grid[gi]);
        static const char* cond_names[] = {"clean", "cfo", "cfo_noise"};
        const double cfo = cond >= 1 ? c.exp.cfo_hz : 0.0;
        const std::optional<double> osnr = cond == 2 ? c.exp.osnr_db : std::nullopt;
        const std::uint64_t seed = trial_seed(c.master, c.exp.id, gi, 0);
        for (auto alg : c.exp.algorithms) {
            const auto frame = make_frame(c.sys, preamble_for(alg, c.pre), c.exp.data_symbols, seed);
            const auto ch = trial_channel(c.sys, cfo, osnr, seed);
            const CVec r = receive(c.sys, frame.samples, ch);
            const auto s = run_sync(alg, r, c.pre, c.sys);
            const std::size_t truth = ch.delay_samples + frame.sync_start;
            const auto& v = s.trace.values;
            const std::size_t idx = s.d_hat - s.trace.window_start;
            double side = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i + 2 < idx || i > idx + 2) side = std::max(side, v[i]);
            }
            const std::string name = to_string(alg);
            const double g = c.exp.grid[gi];
            out.rows.push_back(c.row(name, g, "peak_value", v[idx], 1));
            out.rows.push_back(c.row(name, g, "timing_error", static_cast<double>(s.d_hat) - truth, 1));
            out.rows.push_back(c.row(name, g, "plateau_length",
                                     static_cast<double>(longest_run_containing(v, idx, 0.99 * v[idx])), 1));
            out.rows.push_back(c.row(name, g, "max_sidelobe", side, 1));
            out.traces.push_back({name + "_" + cond_names[cond], truth, s.trace.window_start, v});

            if (alg == Algorithm::Proposed && cond == 1) {
                // Same CFO applied after the fiber instead of before it: the
                // LO-referenced CD equalizer then leaves a group-delay shift of
                // -K cfo fs samples on the training symbol.
                auto sig = channel::apply_delay(frame.samples, ch.delay_samples);
                sig = channel::append_zeros(sig, ch.tail_zeros);
                sig = channel::apply_cd(sig, c.sys.fiber);
                sig = channel::apply_cfo(sig, cfo);
                auto eq = rx::cd_equalize_overlap_add(sig, c.sys.fiber, c.sys.fde_block_size, c.sys.overlap());
                eq.samples.resize(ch.delay_samples + frame.samples.size());
                const auto pf = run_sync(alg, eq.samples, c.pre, c.sys);
                const std::size_t pidx = pf.d_hat - pf.trace.window_start;
                const std::string pname = "proposed_postfiber_cfo";
                out.rows.push_back(c.row(pname, g, "peak_value", pf.trace.values[pidx], 1));
                out.rows.push_back(c.row(pname, g, "timing_error", static_cast<double>(pf.d_hat) - truth, 1));
                out.rows.push_back(c.row(pname, g, "predicted_timing_error",
                                         -c.sys.fiber.beta_s2() * cfo * f.sample_rate, 1));
                out.rows.push_back(c.row(pname, g, "cfo_hz_hat", pf.cfo_hz.value_or(0.0), 1));
                out.traces.push_back({pname, truth, pf.trace.window_start, pf.trace.values});
            }
        }
    }
}

// Runs every (grid point, algorithm, trial) sync trial with common random
// numbers across algorithms.
std::vector<SyncTrial> sync_trials(const Ctx& c, const std::vector<double>& cfo, const std::vector<std::optional<double>>& osnr)
{
    const std::size_t ng = c.exp.grid.size();
    const std::size_t na = c.exp.algorithms.size();
    const std::size_t nt = c.exp.trials;
    std::vector<SyncTrial> res(ng * na * nt);
    parallel_for(
        res.size(),
        [&](std::size_t k) {
            const std::size_t t = k % nt;
            const std::size_t a = (k / nt) % na;
            const std::size_t g = k / (nt * na);
            res[k] = run_sync_trial(c.exp.algorithms[a], c.sys, c.pre, cfo[g], osnr[g], c.exp.data_symbols,
                                    trial_seed(c.master, c.exp.id, g, t));
        },
        c.threads);
    return res;
}

void run_sync_kind(const Ctx& c, ExperimentResult& out)
{
    const std::size_t ng = c.exp.grid.size();
    std::vector<double> cfo(ng);
    std::vector<std::optional<double>> osnr(ng);
    for (std::size_t g = 0; g < ng; ++g) {
        if (grid_is_osnr(c.exp.kind)) {
            cfo[g] = c.exp.cfo_hz;
            osnr[g] = c.exp.grid[g];
        } else {
            cfo[g] = c.exp.grid[g];
            osnr[g] = c.exp.osnr_db;
        }
    }
    const auto res = sync_trials(c, cfo, osnr);
    const std::size_t na = c.exp.algorithms.size();
    const std::size_t nt = c.exp.trials;
    const double spacing = c.sys.frame.subcarrier_spacing();

    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t a = 0; a < na; ++a) {
            const std::string name = to_string(c.exp.algorithms[a]);
            const double gv = c.exp.grid[g];
            double sum_t = 0.0, sum_t2 = 0.0, sum_cfo = 0.0, sum_err2 = 0.0, max_abs_err = 0.0;
            std::size_t exact = 0, beta_ok = 0, cfo_count = 0, beta_count = 0;
            for (std::size_t t = 0; t < nt; ++t) {
                const auto& r = res[(g * na + a) * nt + t];
                sum_t += static_cast<double>(r.timing_error);
                sum_t2 += static_cast<double>(r.timing_error) * static_cast<double>(r.timing_error);
                exact += r.timing_error == 0 ? 1 : 0;
                if (r.cfo_hz_hat) {
                    const double err = *r.cfo_hz_hat - cfo[g];
                    sum_cfo += *r.cfo_hz_hat;
                    sum_err2 += err * err;
                    max_abs_err = std::max(max_abs_err, std::abs(err));
                    ++cfo_count;
                }
                if (r.beta_hat && r.cfo_hz_hat) {
                    // Integer part resolved: the error is below one subcarrier spacing.
                    beta_ok += std::abs(*r.cfo_hz_hat - cfo[g]) < spacing ? 1 : 0;
                    ++beta_count;
                }
            }
            const double n = static_cast<double>(nt);
            const double mean_t = sum_t / n;
            const double var_t = nt > 1 ? (sum_t2 - n * mean_t * mean_t) / (n - 1.0) : 0.0;
            switch (c.exp.kind) {
            case ExperimentKind::TimingStats:
                out.rows.push_back(c.row(name, gv, "timing_mean", mean_t, nt));
                out.rows.push_back(c.row(name, gv, "timing_variance", std::max(0.0, var_t), nt));
                out.rows.push_back(c.row(name, gv, "exact_fraction", static_cast<double>(exact) / n, nt));
                break;
            case ExperimentKind::CfoSweep:
                out.rows.push_back(c.row(name, gv, "cfo_mean_hz", sum_cfo / static_cast<double>(cfo_count), nt));
                out.rows.push_back(c.row(name, gv, "cfo_mse_hz2", sum_err2 / static_cast<double>(cfo_count), nt));
                break;
            case ExperimentKind::CfoMse:
                out.rows.push_back(c.row(name, gv, "cfo_mse_hz2", sum_err2 / static_cast<double>(cfo_count), nt));
                if (beta_count)
                    out.rows.push_back(c.row(name, gv, "beta_correct_fraction",
                                             static_cast<double>(beta_ok) / static_cast<double>(beta_count), nt));
                break;
            case ExperimentKind::RangeCheck:
                out.rows.push_back(c.row(name, gv, "cfo_mean_hz", sum_cfo / static_cast<double>(cfo_count), nt));
                out.rows.push_back(c.row(name, gv, "max_abs_cfo_error_hz", max_abs_err, nt));
                if (beta_count)
                    out.rows.push_back(c.row(name, gv, "beta_correct_fraction",
                                             static_cast<double>(beta_ok) / static_cast<double>(beta_count), nt));
                out.rows.push_back(c.row(name, gv, "exact_fraction", static_cast<double>(exact) / n, nt));
                break;
            default: break;
            }
        }
    }
}

void run_ber_kind(const Ctx& c, ExperimentResult& out)
{
    const std::size_t bits_per_frame = c.exp.data_symbols * c.sys.frame.bits_per_ofdm_symbol();
    const auto frames = std::max<std::size_t>(
        c.exp.trials, static_cast<std::size_t>(std::ceil(c.exp.min_bits / static_cast<double>(bits_per_frame))));

    struct Series {
        std::string name;
        std::vector<double> cfo;
        std::vector<std::optional<double>> osnr;
    };
    std::vector<Series> series;
    const std::size_t ng = c.exp.grid.size();
    if (c.exp.kind == ExperimentKind::BerVsCfo) {
        Series s{"proposed", c.exp.grid, std::vector<std::optional<double>>(ng, c.exp.osnr_db)};
        series.push_back(std::move(s));
    } else {
        std::vector<std::optional<double>> o(c.exp.grid.begin(), c.exp.grid.end());
        series.push_back({"proposed", std::vector<double>(ng, c.exp.cfo_hz), o});
        series.push_back({"no_cfo_reference", std::vector<double>(ng, 0.0), o});
    }

    std::vector<std::vector<double>> curves;
    for (const auto& s : series) {
        std::vector<rx::BerReport> reps(ng * frames);
        parallel_for(
            reps.size(),
            [&](std::size_t k) {
                const std::size_t g = k / frames;
                reps[k] = run_ber_trial(c.sys, c.pre, s.cfo[g], s.osnr[g], c.exp.data_symbols,
                                        trial_seed(c.master, c.exp.id, g, k % frames));
            },
            c.threads);
        std::vector<double> curve;
        for (std::size_t g = 0; g < ng; ++g) {
            std::size_t errs = 0, total = 0;
            for (std::size_t t = 0; t < frames; ++t) {
                errs += reps[g * frames + t].bit_errors;
                total += reps[g * frames + t].bits_total;
            }
            const double ber = static_cast<double>(errs) / static_cast<double>(total);
            curve.push_back(ber);
            out.rows.push_back(c.row(s.name, c.exp.grid[g], "ber", ber, frames));
            out.rows.push_back(c.row(s.name, c.exp.grid[g], "bit_errors", static_cast<double>(errs), frames));
            out.rows.push_back(c.row(s.name, c.exp.grid[g], "bits", static_cast<double>(total), frames));
        }
        curves.push_back(std::move(curve));
    }

    if (c.exp.kind == ExperimentKind::BerVsOsnr) {
        const auto x0 = osnr_at_ber(c.exp.grid, curves[0], c.exp.target_ber);
        const auto x1 = osnr_at_ber(c.exp.grid, curves[1], c.exp.target_ber);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.rows.push_back({c.exp.id, "proposed", "target_ber", c.exp.target_ber, "osnr_at_target_db",
                            x0.value_or(nan), frames});
        out.rows.push_back({c.exp.id, "no_cfo_reference", "target_ber", c.exp.target_ber, "osnr_at_target_db",
                            x1.value_or(nan), frames});
        out.rows.push_back({c.exp.id, "proposed", "target_ber", c.exp.target_ber, "osnr_penalty_db",
                            (x0 && x1) ? *x0 - *x1 : nan, frames});
    }
}

}  // namespace

bool ExperimentResult::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed; });
}

ExperimentResult run_experiment(const Experiment& exp, const SystemParams& sys, std::uint64_t master_seed,
                                unsigned threads)
{
    exp.validate();
    sys.validate();
    const Preambles pre = make_preambles(sys);
    const Ctx c{exp, sys, pre, master_seed, threads, exp.grid_param()};
    ExperimentResult out;
    out.id = exp.id;
    out.kind = exp.kind;
    switch (exp.kind) {
    case ExperimentKind::MetricTrace: run_metric_trace(c, out); break;
    case ExperimentKind::TimingStats:
    case ExperimentKind::CfoSweep:
    case ExperimentKind::CfoMse:
    case ExperimentKind::RangeCheck: run_sync_kind(c, out); break;
    case ExperimentKind::BerVsCfo:
    case ExperimentKind::BerVsOsnr: run_ber_kind(c, out); break;
    }
    out.checks = evaluate_checks(exp, out.rows);
    return out;
}

std::vector<CheckOutcome> evaluate_checks(const Experiment& exp, std::span<const ResultRow> rows)
{
    std::vector<CheckOutcome> outcomes;
    for (const auto& chk : exp.checks) {
        auto matching = [&](const std::string& alg) {
            std::map<double, double> m;
            for (const auto& r : rows)
                if (r.statistic == chk.statistic && (alg.empty() || r.algorithm == alg)) m[r.grid_value] = r.value;
            return m;
        };
        CheckOutcome o;
        const std::string who = chk.algorithm.empty() ? "all" : chk.algorithm;
        std::ostringstream detail;
        const auto lhs = matching(chk.algorithm);
        switch (chk.type) {
        case Check::Type::Bound: {
            o.description = exp.id + ": " + who + " " + chk.statistic + " in [" +
                            (chk.min ? fmt_num(*chk.min) : "-inf") + ", " + (chk.max ? fmt_num(*chk.max) : "inf") +
                            "]";
            o.passed = !lhs.empty();
            for (const auto& [g, v] : lhs) {
                const bool ok = (!chk.min || v >= *chk.min) && (!chk.max || v <= *chk.max);
                if (!ok) {
                    o.passed = false;
                    detail << "at " << fmt_num(g) << ": " << fmt_num(v) << "; ";
                }
            }
            if (lhs.empty()) detail << "no matching rows";
            break;
        }
        case Check::Type::LessThan: {
            o.description = exp.id + ": " + who + " " + chk.statistic + " < " + chk.rhs_algorithm;
            const auto rhs = matching(chk.rhs_algorithm);
            o.passed = !lhs.empty();
            for (const auto& [g, v] : lhs) {
                const auto it = rhs.find(g);
                if (it == rhs.end() || !(v < it->second)) {
                    o.passed = false;
                    detail << "at " << fmt_num(g) << ": " << fmt_num(v) << " vs "
                           << (it == rhs.end() ? "missing" : fmt_num(it->second)) << "; ";
                }
            }
            if (lhs.empty()) detail << "no matching rows";
            break;
        }
        case Check::Type::SpreadRatio: {
            require(chk.max.has_value(), "spread_ratio needs max");
            o.description = exp.id + ": " + who + " " + chk.statistic + " max/min < " + fmt_num(*chk.max);
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& [g, v] : lhs) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
            o.passed = !lhs.empty() && ratio < *chk.max;
            detail << "ratio " << fmt_num(ratio);
            break;
        }
        }
        o.detail = detail.str();
        outcomes.push_back(std::move(o));
    }
    return outcomes;
}

// --- output ---------------------------------------------------------------------------

std::string to_csv(std::span<const ResultRow> rows)
{
    std::string s = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        s += r.experiment + "," + r.algorithm + "," + r.grid_param + "," + fmt_num(r.grid_value) + "," + r.statistic +
             "," + fmt_num(r.value) + "," + std::to_string(r.trials) + "\n";
    }
    return s;
}

void write_csv(const std::filesystem::path& path, std::span<const ResultRow> rows)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << to_csv(rows);
}

namespace {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

std::string svg_escape(const std::string& s)
{
    std::string o;
    for (char ch : s) {
        if (ch == '<') o += "&lt;";
        else if (ch == '>') o += "&gt;";
        else if (ch == '&') o += "&amp;";
        else o += ch;
    }
    return o;
}

std::string line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                       const std::vector<Series>& series, bool log_y)
{
    constexpr double W = 720, H = 440, L = 80, R = 170, T = 40, B = 60;
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
    std::ostringstream o;
    char buf[160];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << svg_escape(title)
      << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                  L, T, W - L - R, H - T - B);
    o << buf;
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0;
        const double yv = y0 + (y1 - y0) * i / 4.0;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.4g</text>\n", px(xv),
                      H - B + 18, xv);
        o << buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s%.3g</text>\n", L - 6,
                      py(yv) + 4, log_y ? "1e" : "", yv);
        o << buf;
    }
    o << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << svg_escape(xlabel) << "</text>\n";
    o << "<text transform=\"translate(18," << (T + (H - T - B) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << svg_escape(ylabel) << (log_y ? " (log10)" : "") << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* col = colors[si % 7];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(ty(s.y[i])));
            o << buf;
        }
        o << "\"/>\n";
        const double ly = T + 16 + 18.0 * static_cast<double>(si);
        std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                      W - R + 10, ly - 4, W - R + 30, ly - 4, col);
        o << buf;
        o << "<text x=\"" << W - R + 36 << "\" y=\"" << ly << "\">" << svg_escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace

std::string render_svg(const ExperimentResult& result)
{
    if (result.kind == ExperimentKind::MetricTrace) {
        std::vector<Series> series;
        for (const auto& t : result.traces) {
            Series s{t.name, {}, {}};
            for (std::size_t i = 0; i < t.values.size(); ++i) {
                const double rel = static_cast<double>(t.start + i) - static_cast<double>(t.true_index);
                if (rel < -200 || rel > 800) continue;
                s.x.push_back(rel);
                s.y.push_back(t.values[i]);
            }
            series.push_back(std::move(s));
        }
        return line_chart(result.id + ": timing metric", "d - d_true (samples)", "M(d)", series, false);
    }
    std::string stat, ylabel;
    bool log_y = false;
    double xscale = 1.0;
    std::string xlabel = "OSNR (dB)";
    switch (result.kind) {
    case ExperimentKind::TimingStats: stat = "timing_variance", ylabel = "timing variance (samples^2)"; break;
    case ExperimentKind::CfoSweep: stat = "cfo_mean_hz", ylabel = "mean estimated CFO (Hz)"; break;
    case ExperimentKind::CfoMse: stat = "cfo_mse_hz2", ylabel = "CFO MSE (Hz^2)", log_y = true; break;
    case ExperimentKind::BerVsCfo:
    case ExperimentKind::BerVsOsnr: stat = "ber", ylabel = "BER", log_y = true; break;
    case ExperimentKind::RangeCheck: stat = "max_abs_cfo_error_hz", ylabel = "|CFO error| (Hz)"; break;
    default: break;
    }
    if (!grid_is_osnr(result.kind)) {
        xlabel = "actual CFO (GHz)";
        xscale = 1e-9;
    }
    std::vector<Series> series;
    std::map<std::string, std::size_t> index;
    for (const auto& r : result.rows) {
        if (r.statistic != stat) continue;
        auto [it, fresh] = index.emplace(r.algorithm, series.size());
        if (fresh) series.push_back({r.algorithm, {}, {}});
        series[it->second].x.push_back(r.grid_value * xscale);
        series[it->second].y.push_back(r.value);
    }
    return line_chart(result.id + ": " + stat, xlabel, ylabel, series, log_y);
}

std::vector<std::filesystem::path> emit_outputs(const std::filesystem::path& out_dir, const ExperimentResult& result)
{
    require(!result.rows.empty(), "no result rows to emit");
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    const auto csv = out_dir / (result.id + ".csv");
    write_csv(csv, result.rows);
    written.push_back(csv);
    const auto svg = out_dir / (result.id + ".svg");
    {
        std::ofstream o(svg, std::ios::binary);
        if (!o) throw InvalidArgument("cannot write " + svg.string());
        o << render_svg(result);
    }
    written.push_back(svg);
    for (const auto& t : result.traces) {
        const auto p = out_dir / (result.id + "_" + t.name + ".csv");
        std::ofstream o(p, std::ios::binary);
        if (!o) throw InvalidArgument("cannot write " + p.string());
        o << "d,offset,metric\n";
        for (std::size_t i = 0; i < t.values.size(); ++i) {
            const std::size_t d = t.start + i;
            o << d << "," << static_cast<long>(d) - static_cast<long>(t.true_index) << "," << fmt_num(t.values[i])
              << "\n";
        }
        written.push_back(p);
    }
    return written;
}

}  // namespace wcsync::harness
