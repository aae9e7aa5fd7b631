// Command-line front end for the experiment harness.

#include "wcsync/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace h = wcsync::harness;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "results";
    std::optional<std::size_t> trials;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("-c,--config", c.config, "JSON config file (defaults apply when omitted)");
    sub->add_option("-s,--seed", c.seed, "master seed, overrides the config");
    sub->add_option("-o,--out", c.out, "output directory")->capture_default_str();
    sub->add_option("-t,--trials", c.trials, "Monte-Carlo trials per grid point, overrides the config");
    sub->add_option("-j,--threads", c.threads, "worker threads (0: all cores)");
}

h::Config load(const Common& c)
{
    h::Config cfg = c.config.empty() ? h::Config{} : h::load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    return cfg;
}

// Runs the given experiments and writes their outputs; returns false if any check failed.
bool run_all(std::vector<h::Experiment> exps, const h::Config& cfg, const Common& c)
{
    bool ok = true;
    for (auto& e : exps) {
        if (c.trials) e.trials = *c.trials;
        std::cerr << "running " << e.id << " (" << h::to_string(e.kind) << ", " << e.trials << " trials)\n";
        const auto res = h::run_experiment(e, cfg.system, cfg.seed, c.threads);
        for (const auto& p : h::emit_outputs(c.out, res)) std::cerr << "  wrote " << p.string() << "\n";
        for (const auto& chk : res.checks) {
            std::cout << (chk.passed ? "PASS " : "FAIL ") << chk.description;
            if (!chk.detail.empty()) std::cout << " (" << chk.detail << ")";
            std::cout << "\n";
        }
        ok = ok && res.passed();
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weighted-CAZAC OFDM synchronization simulator"};
    app.require_subcommand(1);

    Common common;
    std::vector<std::pair<CLI::App*, h::ExperimentKind>> kind_cmds;
    const std::pair<const char*, h::ExperimentKind> kinds[] = {
        {"metric-trace", h::ExperimentKind::MetricTrace}, {"timing-stats", h::ExperimentKind::TimingStats},
        {"cfo-sweep", h::ExperimentKind::CfoSweep},       {"cfo-mse", h::ExperimentKind::CfoMse},
        {"ber-vs-cfo", h::ExperimentKind::BerVsCfo},      {"ber-vs-osnr", h::ExperimentKind::BerVsOsnr},
        {"range-check", h::ExperimentKind::RangeCheck},
    };
    for (const auto& [name, kind] : kinds) {
        auto* sub = app.add_subcommand(name, "run the " + h::to_string(kind) +
                                                 " experiments of the config (or the built-in default)");
        add_common(sub, common);
        kind_cmds.emplace_back(sub, kind);
    }
    auto* run = app.add_subcommand("run", "run every experiment listed in the config");
    add_common(run, common);

    auto* rate = app.add_subcommand("rate", "print net bit rate and subcarrier spacing");
    add_common(rate, common);

    auto* defaults = app.add_subcommand("default-config", "print the default config as JSON");

    std::string dump_path = "frame.iq";
    std::string dump_alg = "proposed";
    double dump_cfo = 0.0;
    std::optional<double> dump_osnr;
    std::size_t dump_ds = 10;
    bool dump_tx_only = false;
    auto* dump = app.add_subcommand("dump-frame", "write one transmitted or received frame as a binary I/Q file");
    add_common(dump, common);
    dump->add_option("-f,--file", dump_path, "output file")->capture_default_str();
    dump->add_option("--algorithm", dump_alg, "preamble type: proposed, schmidl_cox, schmidl_cox_single, minn")
        ->capture_default_str();
    dump->add_option("--cfo-hz", dump_cfo, "carrier frequency offset");
    dump->add_option("--osnr-db", dump_osnr, "OSNR; omit for a noiseless channel");
    dump->add_option("--data-symbols", dump_ds, "payload symbols")->capture_default_str();
    dump->add_flag("--tx", dump_tx_only, "dump the transmitted frame instead of the channel output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (defaults->parsed()) {
            std::cout << h::default_config_json();
            return 0;
        }
        const h::Config cfg = load(common);

        if (rate->parsed()) {
            const auto rows = h::rate_rows(cfg.system);
            std::filesystem::create_directories(common.out);
            h::write_csv(std::filesystem::path(common.out) / "rate.csv", rows);
            for (const auto& r : rows) std::printf("%s = %.6f\n", r.statistic.c_str(), r.value);
            return 0;
        }

        if (dump->parsed()) {
            const auto alg = h::parse_algorithm(dump_alg);
            const auto pre = h::make_preambles(cfg.system);
            const auto& f = cfg.system.frame;
            const auto bits = wcsync::tx::random_bits(dump_ds * f.bits_per_ofdm_symbol(), cfg.seed);
            const auto frame = wcsync::tx::assemble_frame(h::preamble_for(alg, pre), f, bits);
            wcsync::tx::SignalDump d;
            d.n = f.n;
            d.n_cp = f.n_cp;
            d.layout = frame.layout_string();
            if (dump_tx_only) {
                d.signal = frame.samples;
                d.sync_start = frame.sync_start;
            } else {
                const auto ch = h::trial_channel(cfg.system, dump_cfo, dump_osnr, cfg.seed);
                d.signal = {h::receive(cfg.system, frame.samples, ch), f.sample_rate};
                d.sync_start = ch.delay_samples + frame.sync_start;
            }
            wcsync::tx::write_signal(dump_path, d);
            std::cerr << "wrote " << d.signal.size() << " samples to " << dump_path << "\n";
            return 0;
        }

        std::vector<h::Experiment> exps;
        if (run->parsed()) {
            exps = cfg.experiments;
            if (exps.empty()) throw wcsync::InvalidArgument("config lists no experiments");
        } else {
            for (const auto& [sub, kind] : kind_cmds) {
                if (!sub->parsed()) continue;
                for (const auto& e : cfg.experiments)
                    if (e.kind == kind) exps.push_back(e);
                if (exps.empty()) exps.push_back(h::default_experiment(kind));
            }
        }
        return run_all(exps, cfg, common) ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
