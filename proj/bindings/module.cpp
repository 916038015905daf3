#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "cavnet/protocol.hpp"

namespace py = pybind11;

namespace {

using namespace cavnet;

std::pair<bool, bool> show_flags(const StateVector& psi) {
    bool ext = false;
    bool port = false;
    for (const auto& [label, amp] : psi.amplitudes())
        for (const auto& [mode, count] : label.external) {
            if (mode.kind == ModeKind::external) ext = true;
            if (mode.kind == ModeKind::port) port = true;
        }
    return {ext, port};
}

std::map<std::string, Complex> amplitudes_dict(const StateVector& psi) {
    auto [ext, port] = show_flags(psi);
    std::map<std::string, Complex> out;
    for (const auto& [label, amp] : psi.amplitudes())
        out[label_to_string(label, ext, port)] = amp;
    return out;
}

StateVector state_from_dict(int n_sites, const std::map<std::string, Complex>& amplitudes) {
    StateVector psi(n_sites);
    for (const auto& [text, amp] : amplitudes) psi.add_amplitude(label_from_string(text), amp);
    return psi;
}

ScatteringMatrix matrix_from_rows(const std::vector<std::vector<Complex>>& rows) {
    int n = static_cast<int>(rows.size());
    if (n < 1) throw ValidationError("network size must be at least 1");
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n)
            throw ValidationError("scattering matrix must be square and non-empty");
        for (int c = 0; c < n; ++c) m(r, c) = rows[r][c];
    }
    return ScatteringMatrix::from_matrix(m);
}

ScatteringMatrix named_network(const std::string& name, int n_sites) {
    if (name == "identity") return ScatteringMatrix::identity(n_sites);
    if (name == "bs5050") {
        if (n_sites != 2)
            throw ValidationError("the bs5050 network needs exactly 2 sites, got " +
                                  std::to_string(n_sites));
        return ScatteringMatrix::beamsplitter_50_50();
    }
    if (name == "dft") return ScatteringMatrix::dft_multiport(n_sites);
    throw ValidationError("unknown network '" + name + "'");
}

py::dict outcome_set_dict(const OutcomeSet& set) {
    py::list rows;
    for (const Outcome& o : set.outcomes) {
        py::dict row;
        row["pattern"] = o.pattern;
        row["probability"] = o.probability;
        row["state"] = o.conditional ? py::cast(*o.conditional) : py::none();
        rows.append(std::move(row));
    }
    py::dict out;
    out["outcomes"] = std::move(rows);
    out["failure_probability"] = set.failure_probability;
    return out;
}

ProtocolConfig build_config(int n_sites, const std::string& network, const std::string& accept,
                            std::optional<std::uint64_t> seed, int max_attempts) {
    ProtocolConfig cfg;
    cfg.n_sites = n_sites;
    cfg.network_label = network;
    cfg.network = named_network(network, n_sites);
    cfg.accept = AcceptRule::parse(accept, n_sites);
    cfg.seed = seed;
    cfg.max_attempts = max_attempts;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "cavity-network entanglement simulator core";

    py::register_exception<Error>(m, "Error");
    py::register_exception<IoError>(m, "IoError");
    auto validation = py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<EmptyAcceptanceError>(m, "EmptyAcceptanceError", validation.ptr());

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<int, double>(), py::arg("n_sites"),
             py::arg("prune_epsilon") = kDefaultPruneEpsilon)
        .def_property_readonly("n_sites", &StateVector::n_sites)
        .def("norm", &StateVector::norm)
        .def("normalize", &StateVector::normalize)
        .def("is_zero", &StateVector::is_zero)
        .def("__len__", &StateVector::size)
        .def("amplitudes", &amplitudes_dict, "canonical label string -> complex amplitude")
        .def("amplitude",
             [](const StateVector& psi, const std::string& label) {
                 return psi.amplitude(label_from_string(label));
             })
        .def("set_amplitude",
             [](StateVector& psi, const std::string& label, Complex amp) {
                 psi.set_amplitude(label_from_string(label), amp);
             })
        .def("to_json", [](const StateVector& psi) { return state_to_json(psi).dump(2); })
        .def_static(
            "from_json",
            [](const std::string& text) { return state_from_json(Json::parse(text)); })
        .def_static("from_dict", &state_from_dict, py::arg("n_sites"), py::arg("amplitudes"))
        .def("__repr__", [](const StateVector& psi) {
            return "<StateVector n_sites=" + std::to_string(psi.n_sites()) + " terms=" +
                   std::to_string(psi.size()) + ">";
        });

    py::class_<ScatteringMatrix>(m, "ScatteringMatrix")
        .def_static("identity", &ScatteringMatrix::identity, py::arg("n"))
        .def_static("bs5050", &ScatteringMatrix::beamsplitter_50_50)
        .def_static("dft", &ScatteringMatrix::dft_multiport, py::arg("n"))
        .def_static("from_rows", &matrix_from_rows, py::arg("rows"))
        .def_static("named", &named_network, py::arg("name"), py::arg("n"))
        .def_property_readonly("n", &ScatteringMatrix::n)
        .def("entry", &ScatteringMatrix::entry, py::arg("row"), py::arg("col"),
             "1-based matrix entry");

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_property_readonly("tracked",
                               [](const Trajectory& t) {
                                   std::vector<std::string> names;
                                   names.reserve(t.tracked.size());
                                   for (const BasisLabel& label : t.tracked)
                                       names.push_back(label_to_string(label, false, false));
                                   return names;
                               })
        .def_readonly("populations", &Trajectory::populations)
        .def_readonly("norms", &Trajectory::norms)
        .def_readonly("final_state", &Trajectory::final_state)
        .def_readonly("max_excited_population", &Trajectory::max_excited_population)
        .def_readonly("emission_probability", &Trajectory::emission_probability)
        .def("csv", [](const Trajectory& t) {
            std::ostringstream out;
            write_trajectory_csv(t, out);
            return out.str();
        });

    m.def("inner_product", &inner_product, py::arg("bra"), py::arg("ket"));
    m.def("fidelity", &fidelity, py::arg("psi"), py::arg("reference"));
    m.def(
        "project_onto_pattern",
        [](const StateVector& psi, const std::string& pattern) {
            Projection proj = project_onto_external_pattern(psi, pattern_to_modes(pattern));
            return py::make_tuple(proj.probability,
                                  proj.conditional ? py::cast(*proj.conditional) : py::none());
        },
        py::arg("state"), py::arg("pattern"),
        "probability and conditional state for a one-per-port detector pattern");

    m.def("dark_state", &dark_state, py::arg("omega"), py::arg("g"));
    m.def(
        "strong_coupling_ratio",
        [](double g, double kappa, double gamma) {
            StrongCoupling sc = strong_coupling_ratio({g, kappa, gamma});
            return py::make_tuple(sc.ratio, sc.weak);
        },
        py::arg("g"), py::arg("kappa"), py::arg("gamma"));
    m.def(
        "stirap_transfer",
        [](double omega_max, double g, double t_total, int samples, double kappa, double gamma) {
            PulseProfile profile;
            profile.omega_max = omega_max;
            profile.t_total = t_total;
            profile.samples = samples;
            PulseHamiltonian h = build_lambda_hamiltonian(omega_max, g);
            StateVector psi0(1);
            psi0.set_amplitude(BasisLabel{{{AtomLevel::v, 0, 0}}, {}}, Complex(1.0, 0.0));
            std::optional<LambdaParams> decay;
            if (kappa > 0.0 || gamma > 0.0) decay = LambdaParams{g, kappa, gamma};
            return evolve_pulse(h, psi0, profile, decay);
        },
        py::arg("omega_max"), py::arg("g") = 1.0, py::arg("t_total") = 200.0,
        py::arg("samples") = 10000, py::arg("kappa") = 0.0, py::arg("gamma") = 0.0,
        "integrate one pulsed transfer in the three-level model");

    m.def("ideal_emit_superposition", &ideal_emit_superposition, py::arg("site"), py::arg("state"),
          py::arg("permissive") = false);
    m.def("ideal_map_to_photon", &ideal_map_to_photon, py::arg("site"), py::arg("state"),
          py::arg("permissive") = false);
    m.def("ideal_single_map", &ideal_single_map, py::arg("site"), py::arg("state"),
          py::arg("permissive") = false);

    m.def("leak_cavity_direct", &leak_cavity_direct, py::arg("site"), py::arg("state"));
    m.def("leak_cavity_through_network", &leak_cavity_through_network, py::arg("network"),
          py::arg("site"), py::arg("state"));
    m.def("leak_all", &leak_all, py::arg("network"), py::arg("state"));

    m.def("prepare_phi0", &prepare_phi0, py::arg("n_sites"),
          py::arg("prune_epsilon") = kDefaultPruneEpsilon);
    m.def("one_per_port_patterns", &one_per_port_patterns, py::arg("n_sites"));
    m.def(
        "enumerate_outcomes",
        [](const StateVector& leaked) { return outcome_set_dict(enumerate_outcomes(leaked)); },
        py::arg("leaked_state"));
    m.def(
        "enumerate_protocol",
        [](int n_sites, const std::string& network) {
            ProtocolConfig cfg = build_config(n_sites, network, "all", std::nullopt, 1);
            return outcome_set_dict(enumerate_outcomes(cfg));
        },
        py::arg("n_sites") = 2, py::arg("network") = "bs5050",
        "prepare, leak through the named network, and measure");
    m.def(
        "run_full_protocol",
        [](int n_sites, const std::string& network, const std::string& accept, std::uint64_t seed,
           int trials, int max_attempts) {
            ProtocolConfig cfg = build_config(n_sites, network, accept, seed, max_attempts);
            FullResult result = run_full_protocol(cfg, trials);
            py::dict out;
            out["report_json"] = full_report(cfg, result).dump(2);
            out["final_state"] = result.final.state;
            out["accepted_pattern"] = result.final.accepted_pattern;
            out["attempts"] = result.final.attempts;
            out["mean_attempts"] = result.monte_carlo.mean_attempts;
            out["acceptance_rate"] = result.monte_carlo.acceptance_rate;
            out["reference_fidelity"] = result.final.reference_fidelity
                                            ? py::cast(*result.final.reference_fidelity)
                                            : py::none();
            return out;
        },
        py::arg("n_sites") = 2, py::arg("network") = "bs5050", py::arg("accept") = "all",
        py::arg("seed") = 1, py::arg("trials") = 10000, py::arg("max_attempts") = 1000);
    m.def("run_mapping", &run_mapping, py::arg("state"));
    m.def("singlet_reference", &singlet_reference);
    m.def("photonic_singlet_reference", &photonic_singlet_reference);
    m.def("w_state_reference", py::overload_cast<int>(&w_state_reference), py::arg("n_sites"));
    m.def("w_state_reference_phased",
          py::overload_cast<const std::vector<Complex>&>(&w_state_reference),
          py::arg("amplitudes"));
}
