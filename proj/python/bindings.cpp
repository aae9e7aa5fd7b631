// numpy-facing wrappers around the C++ core.

#include "wcsync/channel.hpp"
#include "wcsync/harness.hpp"
#include "wcsync/rx.hpp"
#include "wcsync/seq.hpp"
#include "wcsync/sync.hpp"
#include "wcsync/txframe.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace wcsync;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CVec to_cvec(const CArray& a)
{
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return CVec(a.data(), a.data() + a.size());
}

std::vector<double> to_dvec(const RArray& a)
{
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return std::vector<double>(a.data(), a.data() + a.size());
}

template <class T>
py::array_t<T> to_array(const std::vector<T>& v)
{
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

channel::FiberParams fiber(double km, double d, double lambda)
{
    return {km, d, lambda};
}

py::dict trace_dict(const sync::TimingTrace& t)
{
    py::dict d;
    d["values"] = to_array(t.values);
    d["window_start"] = t.window_start;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Weighted-CAZAC OFDM synchronization toolkit";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<EstimationError>(m, "EstimationError", PyExc_RuntimeError);

    // --- sequences
    m.def("cazac_sequence", [](std::size_t length, std::size_t root) {
        return to_array(seq::cazac_sequence({length, root}));
    }, py::arg("length"), py::arg("root"));
    m.def("periodic_autocorrelation", [](const CArray& c, std::size_t tau) {
        return seq::periodic_autocorrelation(to_cvec(c), tau);
    }, py::arg("c"), py::arg("tau"));
    m.def("pn_sequence", [](std::size_t length, std::uint64_t seed) {
        return to_array(seq::pn_sequence(length, seed).values());
    }, py::arg("length"), py::arg("seed"));

    py::class_<seq::TrainingSymbol>(m, "TrainingSymbol")
        .def_property_readonly("n", [](const seq::TrainingSymbol& t) { return t.n; })
        .def_property_readonly("a_half", [](const seq::TrainingSymbol& t) { return to_array(t.a_half); })
        .def_property_readonly("b_half", [](const seq::TrainingSymbol& t) { return to_array(t.b_half); })
        .def_property_readonly("pn", [](const seq::TrainingSymbol& t) -> py::object {
            if (!t.pn) return py::none();
            return to_array(t.pn->values());
        })
        .def("useful", [](const seq::TrainingSymbol& t) { return to_array(t.useful()); })
        .def("with_cp", [](const seq::TrainingSymbol& t) { return to_array(t.with_cp()); })
        .def("spectrum", [](const seq::TrainingSymbol& t) { return to_array(t.spectrum()); });

    m.def("build_training_symbol",
          [](std::size_t n, std::size_t n_sc, std::size_t root, std::optional<std::uint64_t> pn_seed,
             std::size_t n_cp) {
              std::optional<seq::PnSequence> pn;
              if (pn_seed) pn = seq::pn_sequence(n / 2, *pn_seed);
              return seq::build_training_symbol(n, n_sc, root, pn, n_cp);
          },
          py::arg("n") = 512, py::arg("n_sc") = 412, py::arg("root") = 205, py::arg("pn_seed") = 1,
          py::arg("n_cp") = 46, "PN-weighted training symbol; pn_seed=None gives identical halves");

    // --- transmitter
    m.def("qam_map", [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> bits,
                        std::size_t order) {
        return to_array(tx::qam_map(std::span<const std::uint8_t>(bits.data(), bits.size()), order));
    }, py::arg("bits"), py::arg("order") = 16);
    m.def("qam_demap", [](const CArray& s, std::size_t order) {
        return to_array(tx::qam_demap(to_cvec(s), order));
    }, py::arg("symbols"), py::arg("order") = 16);
    m.def("net_bit_rate", [](std::size_t n, std::size_t n_sc, std::size_t n_cp, std::size_t qam_order,
                             std::size_t ds_per_ts, double sample_rate) {
        tx::FrameConfig f{n, n_sc, n_cp, qam_order, ds_per_ts, sample_rate, std::nullopt};
        f.validate();
        return f.net_bit_rate();
    }, py::arg("n") = 512, py::arg("n_sc") = 412, py::arg("n_cp") = 46, py::arg("qam_order") = 16,
       py::arg("ds_per_ts") = 50, py::arg("sample_rate") = 40e9);
    m.def("build_frame", [](std::size_t data_symbols, std::uint64_t seed, std::uint64_t pn_seed) {
        tx::FrameConfig f;
        const auto ts = seq::build_training_symbol(f.n, f.n_sc, 205, seq::pn_sequence(f.n / 2, pn_seed), f.n_cp);
        const auto frame = tx::assemble_frame(ts, f, tx::random_bits(data_symbols * f.bits_per_ofdm_symbol(), seed));
        py::dict d;
        d["samples"] = to_array(frame.samples.samples);
        d["sync_start"] = frame.sync_start;
        d["bits"] = to_array(frame.tx_bits);
        d["layout"] = frame.layout_string();
        return d;
    }, py::arg("data_symbols") = 10, py::arg("seed") = 1, py::arg("pn_seed") = 1,
       "Reference-numerology frame [SYN | TS | DS ...] with random 16-QAM payload");

    // --- channel
    m.def("apply_cfo", [](const CArray& x, double cfo_hz, double fs) {
        return to_array(channel::apply_cfo({to_cvec(x), fs}, cfo_hz).samples);
    }, py::arg("x"), py::arg("cfo_hz"), py::arg("sample_rate") = 40e9);
    m.def("apply_cd", [](const CArray& x, double km, double fs, bool inverse, double d, double lambda) {
        return to_array(channel::apply_cd({to_cvec(x), fs}, fiber(km, d, lambda), inverse).samples);
    }, py::arg("x"), py::arg("fiber_km"), py::arg("sample_rate") = 40e9, py::arg("inverse") = false,
       py::arg("dispersion_ps_nm_km") = 16.0, py::arg("wavelength_nm") = 1550.0);
    m.def("apply_phase_noise", [](const CArray& x, double lw, std::uint64_t seed, double fs) {
        return to_array(channel::apply_phase_noise({to_cvec(x), fs}, lw, seed).samples);
    }, py::arg("x"), py::arg("linewidth_hz"), py::arg("seed"), py::arg("sample_rate") = 40e9);
    m.def("add_ase", [](const CArray& x, double osnr_db, std::uint64_t seed, double fs) {
        return to_array(channel::add_ase({to_cvec(x), fs}, osnr_db, seed).samples);
    }, py::arg("x"), py::arg("osnr_db"), py::arg("seed"), py::arg("sample_rate") = 40e9);
    m.def("quantize", [](const CArray& x, int bits) {
        return to_array(channel::quantize({to_cvec(x), 1.0}, bits).samples);
    }, py::arg("x"), py::arg("bits"));
    m.def("run_channel",
          [](const CArray& x, double fs, std::size_t delay, double cfo_hz, std::optional<double> osnr_db,
             double km, double lw, std::optional<int> adc_bits, std::size_t tail_zeros, std::uint64_t seed) {
              channel::ChannelConfig c;
              c.delay_samples = delay;
              c.cfo_hz = cfo_hz;
              c.osnr_db = osnr_db;
              c.fiber = fiber(km, 16.0, 1550.0);
              c.linewidth_hz = lw;
              c.adc_bits = adc_bits;
              c.tail_zeros = tail_zeros;
              c.seed = seed;
              return to_array(channel::run_channel({to_cvec(x), fs}, c).samples);
          },
          py::arg("x"), py::arg("sample_rate") = 40e9, py::arg("delay") = 0, py::arg("cfo_hz") = 0.0,
          py::arg("osnr_db") = py::none(), py::arg("fiber_km") = 0.0, py::arg("linewidth_hz") = 0.0,
          py::arg("adc_bits") = py::none(), py::arg("tail_zeros") = 0, py::arg("seed") = 1);

    // --- receiver
    m.def("required_overlap", [](double km, double fs) { return rx::required_overlap(fiber(km, 16.0, 1550.0), fs); },
          py::arg("fiber_km"), py::arg("sample_rate") = 40e9);
    m.def("cd_equalize_overlap_add",
          [](const CArray& x, double km, double fs, std::size_t block, std::optional<std::size_t> overlap) {
              const auto fb = fiber(km, 16.0, 1550.0);
              const std::size_t ov = overlap.value_or(rx::required_overlap(fb, fs));
              return to_array(rx::cd_equalize_overlap_add({to_cvec(x), fs}, fb, block, ov).samples);
          },
          py::arg("x"), py::arg("fiber_km"), py::arg("sample_rate") = 40e9, py::arg("block_size") = 4096,
          py::arg("overlap") = py::none());

    // --- synchronization
    m.def("timing_metric", [](const CArray& r, const RArray& pn) {
        const auto p = seq::PnSequence::from_values(to_dvec(pn));
        return trace_dict(sync::timing_metric(to_cvec(r), p, 2 * p.size()));
    }, py::arg("r"), py::arg("pn"));
    m.def("sc_timing_metric", [](const CArray& r, std::size_t n) {
        return trace_dict(sync::sc_timing_metric(to_cvec(r), n));
    }, py::arg("r"), py::arg("n") = 512);
    m.def("minn_timing_metric", [](const CArray& r, std::size_t n) {
        return trace_dict(sync::minn_timing_metric(to_cvec(r), n));
    }, py::arg("r"), py::arg("n") = 512);
    m.def("estimate_integer_cfo", [](const CArray& rx_ts, const CArray& ref_spectrum) {
        const auto ic = sync::estimate_integer_cfo(to_cvec(rx_ts), to_cvec(ref_spectrum));
        py::dict d;
        d["beta_hat"] = ic.beta_hat;
        d["psi"] = to_array(ic.psi);
        d["beta_start"] = ic.beta_start;
        return d;
    }, py::arg("rx_ts"), py::arg("ref_spectrum"));
    m.def("synchronize", [](const CArray& r, const seq::TrainingSymbol& ts, double fs) {
        const auto res = sync::synchronize(to_cvec(r), ts, {ts.n, fs});
        py::dict d;
        d["d_hat"] = res.d_hat;
        d["alpha_hat"] = res.alpha_hat;
        d["beta_hat"] = res.beta_hat;
        d["rho_hat"] = res.rho_hat;
        d["cfo_hz_hat"] = res.cfo_hz_hat;
        d["timing"] = trace_dict(res.timing);
        d["psi"] = to_array(res.psi);
        d["psi_beta_start"] = res.psi_beta_start;
        return d;
    }, py::arg("r"), py::arg("ts"), py::arg("sample_rate") = 40e9);

    // --- experiments
    m.def("default_config_json", &harness::default_config_json);
    m.def("run_experiment",
          [](const std::string& kind, const std::string& config_json, std::optional<std::size_t> trials,
             std::optional<std::uint64_t> seed, unsigned threads) {
              const auto cfg = harness::config_from_json(config_json);
              harness::Experiment e = harness::default_experiment(harness::parse_kind(kind));
              for (const auto& x : cfg.experiments)
                  if (x.kind == e.kind) {
                      e = x;
                      break;
                  }
              if (trials) e.trials = *trials;
              harness::ExperimentResult res;
              {
                  py::gil_scoped_release release;
                  res = harness::run_experiment(e, cfg.system, seed.value_or(cfg.seed), threads);
              }
              py::list rows;
              for (const auto& r : res.rows) {
                  py::dict d;
                  d["experiment"] = r.experiment;
                  d["algorithm"] = r.algorithm;
                  d["grid_param"] = r.grid_param;
                  d["grid_value"] = r.grid_value;
                  d["statistic"] = r.statistic;
                  d["value"] = r.value;
                  d["trials"] = r.trials;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("kind"), py::arg("config_json") = "{}", py::arg("trials") = py::none(),
          py::arg("seed") = py::none(), py::arg("threads") = 0,
          "Runs one experiment kind (from config_json if listed there) and returns its result rows");
}
