#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "cavnet/protocol.hpp"

namespace {

using cavnet::Json;

Json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw cavnet::IoError(std::string("cannot read ") + what + " file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw cavnet::ValidationError(std::string(what) + " file '" + path +
                                      "' is not valid JSON: " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cavnet::IoError("cannot write file '" + path + "'");
    out << text;
    if (!out) throw cavnet::IoError("cannot write file '" + path + "'");
}

const std::vector<std::string> kKnownConfigKeys = {
    "n",       "network", "accept",  "seed", "trials", "max_attempts", "omega_max",
    "g",       "t",       "samples", "kappa", "gamma",  "out",          "out_state",
    "in"};

// Values from --config fill in whatever was not given on the command line;
// flags always win.
class ConfigMerge {
public:
    ConfigMerge(const CLI::App& sub, const std::string& config_path) : m_sub(sub) {
        if (config_path.empty()) return;
        m_values = read_json_file(config_path, "config");
        if (!m_values.is_object())
            throw cavnet::ValidationError("config file '" + config_path +
                                          "' must hold a JSON object");
        for (const auto& [key, value] : m_values.items())
            if (std::find(kKnownConfigKeys.begin(), kKnownConfigKeys.end(), key) ==
                kKnownConfigKeys.end())
                throw cavnet::ValidationError("unknown config key '" + key + "'");
    }

    template <typename T>
    void fill(const std::string& flag, const std::string& key, T& value) const {
        if (m_sub.count(flag) > 0 || !m_values.contains(key)) return;
        try {
            value = m_values.at(key).get<T>();
        } catch (const Json::exception&) {
            throw cavnet::ValidationError("config key '" + key + "' has the wrong type");
        }
    }

    template <typename T>
    void fill_optional(const std::string& flag, const std::string& key,
                       std::optional<T>& value) const {
        if (m_sub.count(flag) > 0 || !m_values.contains(key)) return;
        try {
            value = m_values.at(key).get<T>();
        } catch (const Json::exception&) {
            throw cavnet::ValidationError("config key '" + key + "' has the wrong type");
        }
    }

private:
    const CLI::App& m_sub;
    Json m_values;
};

cavnet::ScatteringMatrix resolve_network(const std::string& text, int n_sites,
                                         std::string& label) {
    if (text == "identity") {
        label = "identity";
        return cavnet::ScatteringMatrix::identity(n_sites);
    }
    if (text == "bs5050") {
        label = "bs5050";
        if (n_sites != 2)
            throw cavnet::ValidationError("the bs5050 network needs exactly 2 sites, got " +
                                          std::to_string(n_sites));
        return cavnet::ScatteringMatrix::beamsplitter_50_50();
    }
    if (text == "dft") {
        label = "dft";
        return cavnet::ScatteringMatrix::dft_multiport(n_sites);
    }
    // anything else is a matrix file: {"n": int, "matrix": [[re, im], ...]} row-major
    label = text;
    Json j = read_json_file(text, "network");
    int n = 0;
    std::vector<std::array<double, 2>> entries;
    try {
        n = j.at("n").get<int>();
        entries = j.at("matrix").get<std::vector<std::array<double, 2>>>();
    } catch (const Json::exception& e) {
        throw cavnet::ValidationError("network file '" + text + "' is malformed: " + e.what());
    }
    if (n != n_sites)
        throw cavnet::ValidationError("network size " + std::to_string(n) +
                                      " does not match the number of sites " +
                                      std::to_string(n_sites));
    return cavnet::ScatteringMatrix::from_row_major(n, entries);
}

void print_outcome_table(const cavnet::OutcomeSet& set) {
    std::printf("%-10s %s\n", "pattern", "probability");
    for (const cavnet::Outcome& o : set.outcomes)
        std::printf("%-10s %.10g\n", o.pattern.c_str(), o.probability);
    std::printf("%-10s %.10g\n", "failure", set.failure_probability);
}

struct OutcomesArgs {
    int n = 2;
    std::string network = "bs5050";
    std::string out = "report.json";
    std::string config;
};

int cmd_outcomes(const CLI::App& sub, OutcomesArgs& args) {
    ConfigMerge merge(sub, args.config);
    merge.fill("--n", "n", args.n);
    merge.fill("--network", "network", args.network);
    merge.fill("--out", "out", args.out);

    cavnet::ProtocolConfig cfg;
    cfg.n_sites = args.n;
    cfg.network = resolve_network(args.network, args.n, cfg.network_label);
    cfg.accept = cavnet::AcceptRule::parse("all", args.n);
    cavnet::OutcomeSet set = cavnet::enumerate_outcomes(cfg);

    print_outcome_table(set);
    write_text_file(args.out, cavnet::outcome_report(cfg, set).dump(2) + "\n");
    std::printf("report: %s\n", args.out.c_str());
    return 0;
}

struct FullArgs {
    int n = 2;
    std::string network = "bs5050";
    std::string accept = "all";
    std::optional<std::uint64_t> seed;
    int trials = 10000;
    int max_attempts = 1000;
    std::string out = "report.json";
    std::string out_state = "final_state.json";
    std::string config;
};

int cmd_full(const CLI::App& sub, FullArgs& args) {
    ConfigMerge merge(sub, args.config);
    merge.fill("--n", "n", args.n);
    merge.fill("--network", "network", args.network);
    merge.fill("--accept", "accept", args.accept);
    merge.fill_optional("--seed", "seed", args.seed);
    merge.fill("--trials", "trials", args.trials);
    merge.fill("--max-attempts", "max_attempts", args.max_attempts);
    merge.fill("--out", "out", args.out);
    merge.fill("--out-state", "out_state", args.out_state);
    if (!args.seed)
        throw cavnet::ValidationError("a seed is required: pass --seed or put \"seed\" in the config");

    cavnet::ProtocolConfig cfg;
    cfg.n_sites = args.n;
    cfg.network = resolve_network(args.network, args.n, cfg.network_label);
    cfg.accept = cavnet::AcceptRule::parse(args.accept, args.n);
    cfg.seed = args.seed;
    cfg.max_attempts = args.max_attempts;

    cavnet::FullResult result = cavnet::run_full_protocol(cfg, args.trials);

    std::printf("accepted pattern: %s (attempt %d)\n", result.final.accepted_pattern.c_str(),
                result.final.attempts);
    std::printf("mean attempts over %d trials: %.10g\n",
                static_cast<int>(result.monte_carlo.logs.size()),
                result.monte_carlo.mean_attempts);
    if (result.final.reference_fidelity)
        std::printf("photonic singlet fidelity: %.10g\n", *result.final.reference_fidelity);
    write_text_file(args.out, cavnet::full_report(cfg, result).dump(2) + "\n");
    write_text_file(args.out_state, cavnet::state_to_json(result.final.state).dump(2) + "\n");
    std::printf("report: %s\nfinal state: %s\n", args.out.c_str(), args.out_state.c_str());
    return 0;
}

struct MapArgs {
    std::string in;
    std::string out = "mapped_state.json";
    std::string config;
};

int cmd_map(const CLI::App& sub, MapArgs& args) {
    ConfigMerge merge(sub, args.config);
    merge.fill("--in", "in", args.in);
    merge.fill("--out", "out", args.out);
    if (args.in.empty())
        throw cavnet::ValidationError("an input state is required: pass --in or put \"in\" in the config");

    cavnet::StateVector psi = cavnet::state_from_json(read_json_file(args.in, "state"));
    cavnet::StateVector mapped = cavnet::run_mapping(psi);
    write_text_file(args.out, cavnet::state_to_json(mapped).dump(2) + "\n");
    std::printf("mapped state: %s\n", args.out.c_str());
    return 0;
}

struct StirapArgs {
    std::optional<double> omega_max;
    double g = 1.0;
    std::optional<double> t;
    int samples = 10000;
    double kappa = 0.0;
    double gamma = 0.0;
    std::string out = "trajectory.csv";
    std::string config;
};

int cmd_stirap(const CLI::App& sub, StirapArgs& args) {
    ConfigMerge merge(sub, args.config);
    merge.fill_optional("--omega-max", "omega_max", args.omega_max);
    merge.fill("--g", "g", args.g);
    merge.fill_optional("--t", "t", args.t);
    merge.fill("--samples", "samples", args.samples);
    merge.fill("--kappa", "kappa", args.kappa);
    merge.fill("--gamma", "gamma", args.gamma);
    merge.fill("--out", "out", args.out);
    if (!args.omega_max)
        throw cavnet::ValidationError("--omega-max is required (or \"omega_max\" in the config)");
    if (!args.t) throw cavnet::ValidationError("--t is required (or \"t\" in the config)");

    cavnet::PulseProfile profile;
    profile.omega_max = *args.omega_max;
    profile.t_total = *args.t;
    profile.samples = args.samples;

    cavnet::PulseHamiltonian h = cavnet::build_lambda_hamiltonian(*args.omega_max, args.g);
    cavnet::StateVector psi0(1);
    psi0.set_amplitude(cavnet::BasisLabel{{{cavnet::AtomLevel::v, 0, 0}}, {}},
                       cavnet::Complex(1.0, 0.0));

    std::optional<cavnet::LambdaParams> decay;
    if (args.kappa > 0.0 || args.gamma > 0.0)
        decay = cavnet::LambdaParams{args.g, args.kappa, args.gamma};
    if (args.kappa > 0.0 && args.gamma > 0.0) {
        cavnet::StrongCoupling sc = cavnet::strong_coupling_ratio(*decay);
        std::printf("strong-coupling ratio g^2/(kappa*gamma): %.10g\n", sc.ratio);
        if (sc.weak) std::fprintf(stderr, "warning: weak coupling, ratio below 10\n");
    }

    cavnet::Trajectory traj = cavnet::evolve_pulse(h, psi0, profile, decay);

    cavnet::StateVector final_state = traj.final_state;
    double norm = final_state.norm();
    if (norm > 0.0) final_state.normalize();
    cavnet::Complex amp =
        final_state.amplitude(cavnet::BasisLabel{{{cavnet::AtomLevel::u_plus, 1, 0}}, {}});
    double fid = std::norm(amp);

    std::printf("final fidelity to the transfer target: %.10g\n", fid);
    std::printf("max excited-state population: %.10g\n", traj.max_excited_population);
    if (decay) {
        std::printf("survival probability: %.10g\n", norm * norm);
        std::printf("emission probability: %.10g\n", traj.emission_probability);
    }
    if (fid < 0.99)
        std::fprintf(stderr, "warning: non-adiabatic pulse, transfer fidelity below 0.99\n");

    std::ostringstream csv;
    cavnet::write_trajectory_csv(traj, csv);
    write_text_file(args.out, csv.str());
    std::printf("trajectory: %s\n", args.out.c_str());
    return 0;
}

int cmd_networks() {
    std::printf("%-10s %s\n", "identity", "photons keep their port (any n)");
    std::printf("%-10s %s\n", "bs5050", "50:50 beamsplitter (n = 2)");
    std::printf("%-10s %s\n", "dft", "discrete-Fourier-transform multiport (any n)");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity-network entanglement simulator"};
    app.require_subcommand(1);
    app.footer("Config files are JSON objects keyed like the long flags (dashes as underscores);\n"
               "command-line flags take precedence over config values.");

    OutcomesArgs outcomes_args;
    CLI::App* outcomes = app.add_subcommand("outcomes", "enumerate detector patterns exactly");
    outcomes->add_option("--n", outcomes_args.n, "number of sites");
    outcomes->add_option("--network", outcomes_args.network,
                         "built-in network name or matrix JSON file");
    outcomes->add_option("--out", outcomes_args.out, "report file");
    outcomes->add_option("--config", outcomes_args.config, "config file (JSON)");

    FullArgs full_args;
    CLI::App* full = app.add_subcommand("full", "run the repeat-until-success protocol");
    full->add_option("--n", full_args.n, "number of sites");
    full->add_option("--network", full_args.network, "built-in network name or matrix JSON file");
    full->add_option("--accept", full_args.accept,
                     "acceptance rule: all, singlet, one-plus, or a pattern list");
    full->add_option("--seed", full_args.seed, "random seed (required)");
    full->add_option("--trials", full_args.trials, "Monte Carlo trial count");
    full->add_option("--max-attempts", full_args.max_attempts, "attempt cap per trial");
    full->add_option("--out", full_args.out, "report file");
    full->add_option("--out-state", full_args.out_state, "final state file");
    full->add_option("--config", full_args.config, "config file (JSON)");

    MapArgs map_args;
    CLI::App* map = app.add_subcommand("map", "map atomic qubits onto flying photons");
    map->add_option("--in", map_args.in, "input state file (JSON)");
    map->add_option("--out", map_args.out, "output state file");
    map->add_option("--config", map_args.config, "config file (JSON)");

    StirapArgs stirap_args;
    CLI::App* stirap = app.add_subcommand("stirap", "integrate one pulsed transfer");
    stirap->add_option("--omega-max", stirap_args.omega_max, "peak laser coupling");
    stirap->add_option("--g", stirap_args.g, "cavity coupling");
    stirap->add_option("--t", stirap_args.t, "pulse duration");
    stirap->add_option("--samples", stirap_args.samples, "integration steps");
    stirap->add_option("--kappa", stirap_args.kappa, "cavity decay rate");
    stirap->add_option("--gamma", stirap_args.gamma, "excited-state decay rate");
    stirap->add_option("--out", stirap_args.out, "trajectory CSV file");
    stirap->add_option("--config", stirap_args.config, "config file (JSON)");

    CLI::App* networks = app.add_subcommand("networks", "list the built-in networks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (outcomes->parsed()) return cmd_outcomes(*outcomes, outcomes_args);
        if (full->parsed()) return cmd_full(*full, full_args);
        if (map->parsed()) return cmd_map(*map, map_args);
        if (stirap->parsed()) return cmd_stirap(*stirap, stirap_args);
        if (networks->parsed()) return cmd_networks();
    } catch (const cavnet::EmptyAcceptanceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cavnet::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const cavnet::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cavnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
