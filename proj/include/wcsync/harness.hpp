#pragma once

// Monte-Carlo experiment runner: JSON-configured scenarios, deterministic
// per-trial seeding, CSV rows, SVG plots and pass/fail checks.

#include "wcsync/channel.hpp"
#include "wcsync/rx.hpp"
#include "wcsync/sync.hpp"
#include "wcsync/txframe.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wcsync::harness {

enum class ExperimentKind { MetricTrace, TimingStats, CfoSweep, CfoMse, BerVsCfo, BerVsOsnr, RangeCheck };

// SchmidlCox uses the two-symbol preamble (integer CFO from the second
// symbol); SchmidlCoxSingle only has the first symbol.
enum class Algorithm { Proposed, SchmidlCox, SchmidlCoxSingle, Minn };

std::string to_string(ExperimentKind kind);
std::string to_string(Algorithm alg);
ExperimentKind parse_kind(const std::string& name);
Algorithm parse_algorithm(const std::string& name);

// Physical setup shared by all experiments of a config file.
struct SystemParams {
    tx::FrameConfig frame;
    std::size_t cazac_root = 205;
    std::uint64_t pn_seed = 1;           // PN weights of the proposed training symbol
    std::uint64_t sc_seed = 2;           // random QPSK of the second Schmidl-Cox symbol
    channel::FiberParams fiber{800.0, 16.0, 1550.0};
    double linewidth_hz = 200e3;         // applied whenever ASE is enabled
    std::optional<int> adc_bits = 8;     // applied whenever ASE is enabled
    std::size_t delay_samples = 100;
    std::size_t tail_zeros = 512;
    std::size_t fde_block_size = 4096;
    std::size_t fde_overlap = 0;         // 0: rx::required_overlap
    double rf_pilot_psr_db = -12.0;      // BER experiments only
    rx::PilotOptions pilot;

    void validate() const;
    std::size_t overlap() const;
};

// Assertion evaluated against the rows of one experiment.
//   bound:        every matching row lies in [min, max]
//   less_than:    at every grid point, algorithm's value < rhs_algorithm's value
//   spread_ratio: max / min over the grid of the matching rows is below max
struct Check {
    enum class Type { Bound, LessThan, SpreadRatio };
    Type type = Type::Bound;
    std::string statistic;
    std::string algorithm;
    std::string rhs_algorithm;
    std::optional<double> min;
    std::optional<double> max;
};

struct CheckOutcome {
    std::string description;
    bool passed = false;
    std::string detail;
};

struct Experiment {
    std::string id;
    ExperimentKind kind = ExperimentKind::TimingStats;
    std::vector<Algorithm> algorithms;
    std::size_t trials = 200;
    // OSNR (dB) for timing_stats / cfo_mse / ber_vs_osnr, CFO (Hz) for
    // cfo_sweep / ber_vs_cfo / range_check, condition index for metric_trace.
    std::vector<double> grid;
    double cfo_hz = 5e9;                 // fixed CFO when the grid is over OSNR
    std::optional<double> osnr_db;       // fixed OSNR when the grid is over CFO; empty: noiseless
    std::size_t data_symbols = 10;       // payload symbols per sync trial
    double min_bits = 2e5;               // BER experiments: bits per grid point
    double target_ber = 1e-2;            // ber_vs_osnr: penalty reference level
    std::vector<Check> checks;

    void validate() const;
    std::string grid_param() const;
};

// Reference-setup experiment of each kind.
Experiment default_experiment(ExperimentKind kind);

struct Config {
    SystemParams system;
    std::uint64_t seed = 1;
    std::vector<Experiment> experiments;
};

// Missing keys take the defaults above; unknown keys are rejected.
Config config_from_json(const std::string& text);
Config load_config(const std::filesystem::path& path);
// Defaults written back out as JSON (documents every key).
std::string default_config_json();

struct ResultRow {
    std::string experiment;
    std::string algorithm;
    std::string grid_param;
    double grid_value = 0.0;
    std::string statistic;
    double value = 0.0;
    std::size_t trials = 0;
};

struct Trace {
    std::string name;            // e.g. "proposed_cfo"
    std::size_t true_index = 0;
    std::size_t start = 0;       // absolute index of values[0]
    std::vector<double> values;
};

struct ExperimentResult {
    std::string id;
    ExperimentKind kind = ExperimentKind::TimingStats;
    std::vector<ResultRow> rows;
    std::vector<Trace> traces;
    std::vector<CheckOutcome> checks;

    bool passed() const;
};

// --- building blocks ----------------------------------------------------

std::uint64_t trial_seed(std::uint64_t master, const std::string& experiment, std::size_t grid_index,
                         std::size_t trial);

// Runs fn(i) for i in [0, count) on up to `threads` workers (0: hardware).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

struct Preambles {
    seq::TrainingSymbol proposed;
    sync::ScPreamble schmidl_cox;
    seq::MinnSymbol minn;
};
Preambles make_preambles(const SystemParams& sys);

// Time-domain preamble symbols (with CP) transmitted for an algorithm.
std::vector<CVec> preamble_for(Algorithm alg, const Preambles& pre);

// Channel settings for one trial. Laser phase noise and the ADC are enabled
// together with ASE; without an OSNR the channel is noiseless.
channel::ChannelConfig trial_channel(const SystemParams& sys, double cfo_hz, std::optional<double> osnr_db,
                                     std::uint64_t seed);

// Channel, overlap-add CD equalization, trimmed to delay + frame length.
CVec receive(const SystemParams& sys, const ComplexSignal& tx, const channel::ChannelConfig& ch);

struct SyncOutcome {
    std::size_t d_hat = 0;
    std::optional<double> cfo_hz;   // Minn estimates timing only
    std::optional<long> beta_hat;
    sync::TimingTrace trace;
};
SyncOutcome run_sync(Algorithm alg, std::span<const cplx> r, const Preambles& pre, const SystemParams& sys);

struct SyncTrial {
    long timing_error = 0;          // d_hat - true index
    std::optional<double> cfo_hz_hat;
    std::optional<long> beta_hat;
};
SyncTrial run_sync_trial(Algorithm alg, const SystemParams& sys, const Preambles& pre, double cfo_hz,
                         std::optional<double> osnr_db, std::size_t data_symbols, std::uint64_t seed);

// Full chain with the proposed synchronizer and RF-pilot phase tracking.
rx::BerReport run_ber_trial(const SystemParams& sys, const Preambles& pre, double cfo_hz,
                            std::optional<double> osnr_db, std::size_t data_symbols, std::uint64_t seed);

// OSNR at which a BER curve crosses `target`, by linear interpolation of
// log10(BER) between the bracketing grid points. Empty if never crossed.
std::optional<double> osnr_at_ber(std::span<const double> osnr_db, std::span<const double> ber, double target);

// Net rate and subcarrier spacing rows.
std::vector<ResultRow> rate_rows(const SystemParams& sys);

// --- experiments ---------------------------------------------------------

ExperimentResult run_experiment(const Experiment& exp, const SystemParams& sys, std::uint64_t master_seed,
                                unsigned threads = 0);

std::vector<CheckOutcome> evaluate_checks(const Experiment& exp, std::span<const ResultRow> rows);

// --- output ----------------------------------------------------------------

inline constexpr const char* kCsvHeader = "experiment,algorithm,grid_param,grid_value,statistic,value,trials";

std::string to_csv(std::span<const ResultRow> rows);
void write_csv(const std::filesystem::path& path, std::span<const ResultRow> rows);

// Minimal SVG line chart of the experiment's headline statistic (or its
// metric traces).
std::string render_svg(const ExperimentResult& result);

// Writes <id>.csv, <id>.svg and, for metric traces, <id>_<trace>.csv into
// out_dir. Throws on an empty result. Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const std::filesystem::path& out_dir,
                                                const ExperimentResult& result);

}  // namespace wcsync::harness
