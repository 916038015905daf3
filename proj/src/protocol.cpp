#include "cavnet/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cavnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// one engine per stream so trial results never depend on evaluation order;
// stream 0 is the heralding run, streams 1.. are the Monte Carlo trials
std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed + 0x9E3779B97F4A7C15ull * stream));
}

double uniform01(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

SiteLabel ground_site() { return SiteLabel{AtomLevel::v, 0, 0}; }

}  // namespace

StateVector prepare_phi0(int n_sites, double prune_epsilon) {
    if (n_sites < 1) throw ValidationError("need at least one site");
    StateVector psi =
        make_product_state(std::vector<SiteLabel>(n_sites, ground_site()), prune_epsilon);
    for (int site = 1; site <= n_sites; ++site) psi = ideal_emit_superposition(site, psi);
    return psi;
}

std::vector<std::string> one_per_port_patterns(int n_sites) {
    if (n_sites < 1) throw ValidationError("need at least one site");
    if (n_sites > 16) throw ValidationError("pattern enumeration supports at most 16 sites");
    std::vector<std::string> patterns;
    patterns.reserve(std::size_t{1} << n_sites);
    for (std::uint32_t k = 0; k < (std::uint32_t{1} << n_sites); ++k) {
        std::string p(n_sites, '+');
        for (int j = 0; j < n_sites; ++j)
            if ((k >> (n_sites - 1 - j)) & 1u) p[j] = '-';
        patterns.push_back(std::move(p));
    }
    return patterns;
}

std::map<ModeId, int> pattern_to_modes(const std::string& pattern) {
    if (pattern.empty()) throw ValidationError("empty detector pattern");
    std::map<ModeId, int> modes;
    for (std::size_t j = 0; j < pattern.size(); ++j) {
        char c = pattern[j];
        if (c != '+' && c != '-')
            throw ValidationError("detector pattern may only contain '+' and '-', got '" +
                                  std::string(1, c) + "'");
        Polarisation pol = (c == '+') ? Polarisation::plus : Polarisation::minus;
        modes[port_mode(static_cast<int>(j) + 1, pol)] = 1;
    }
    return modes;
}

AcceptRule AcceptRule::parse(const std::string& text, int n_sites) {
    AcceptRule rule;
    rule.text = text;
    if (text == "all") {
        rule.patterns = one_per_port_patterns(n_sites);
        return rule;
    }
    if (text == "singlet") {
        if (n_sites != 2)
            throw ValidationError("singlet acceptance needs exactly 2 sites, got " +
                                  std::to_string(n_sites));
        rule.patterns = {"+-", "-+"};
        return rule;
    }
    if (text == "one-plus") {
        for (const std::string& p : one_per_port_patterns(n_sites))
            if (std::count(p.begin(), p.end(), '+') == 1) rule.patterns.push_back(p);
        return rule;
    }
    // comma-separated explicit list
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw ValidationError("empty pattern in acceptance list");
        if (static_cast<int>(item.size()) != n_sites)
            throw ValidationError("pattern '" + item + "' does not have " +
                                  std::to_string(n_sites) + " ports");
        pattern_to_modes(item);  // character check
        if (std::find(rule.patterns.begin(), rule.patterns.end(), item) != rule.patterns.end())
            throw ValidationError("duplicate pattern '" + item + "' in acceptance list");
        rule.patterns.push_back(item);
    }
    if (rule.patterns.empty()) throw EmptyAcceptanceError("acceptance list is empty");
    std::sort(rule.patterns.begin(), rule.patterns.end());
    return rule;
}

bool AcceptRule::accepts(const std::string& pattern) const {
    return std::find(patterns.begin(), patterns.end(), pattern) != patterns.end();
}

void ProtocolConfig::validate() const {
    if (n_sites < 1) throw ValidationError("need at least one site");
    if (network.n() != n_sites)
        throw ValidationError("network size " + std::to_string(network.n()) +
                              " does not match the number of sites " + std::to_string(n_sites));
    if (max_attempts < 1) throw ValidationError("max attempts must be at least 1");
    if (accept.patterns.empty()) throw EmptyAcceptanceError("acceptance list is empty");
    for (const std::string& p : accept.patterns)
        if (static_cast<int>(p.size()) != n_sites)
            throw ValidationError("acceptance pattern '" + p + "' does not have " +
                                  std::to_string(n_sites) + " ports");
}

namespace {

bool is_one_per_port(const BasisLabel& label, int n_sites) {
    if (label.external.size() != static_cast<std::size_t>(n_sites)) return false;
    std::vector<bool> seen(n_sites, false);
    for (const auto& [mode, count] : label.external) {
        if (mode.kind != ModeKind::port || count != 1) return false;
        if (mode.index < 1 || mode.index > n_sites) return false;
        if (seen[mode.index - 1]) return false;
        seen[mode.index - 1] = true;
    }
    return true;
}

std::string occupancy_string(const std::map<ModeId, int>& occupancy) {
    // canonical "portK=(p,m)" pieces for every mode kind present
    std::map<std::pair<ModeKind, int>, std::pair<int, int>> grouped;
    for (const auto& [mode, count] : occupancy) {
        auto& cell = grouped[{mode.kind, mode.index}];
        (mode.pol == Polarisation::plus ? cell.first : cell.second) = count;
    }
    std::ostringstream out;
    bool first = true;
    for (const auto& [key, counts] : grouped) {
        if (!first) out << ";";
        first = false;
        out << (key.first == ModeKind::port ? "port" : "ext") << key.second << "=(" << counts.first
            << "," << counts.second << ")";
    }
    return out.str();
}

}  // namespace

OutcomeSet enumerate_outcomes(const StateVector& leaked, bool verbose_failures) {
    OutcomeSet set;
    for (const std::string& pattern : one_per_port_patterns(leaked.n_sites())) {
        Projection proj = project_onto_external_pattern(leaked, pattern_to_modes(pattern));
        set.outcomes.push_back({pattern, proj.probability, std::move(proj.conditional)});
    }
    double failure = 0.0;
    std::map<std::string, double> breakdown;
    for (const auto& [label, amp] : leaked.amplitudes()) {
        if (is_one_per_port(label, leaked.n_sites())) continue;
        failure += std::norm(amp);
        if (verbose_failures) breakdown[occupancy_string(label.external)] += std::norm(amp);
    }
    set.failure_probability = failure;
    if (verbose_failures)
        set.failure_breakdown.assign(breakdown.begin(), breakdown.end());
    return set;
}

OutcomeSet enumerate_outcomes(const ProtocolConfig& config, bool verbose_failures) {
    config.validate();
    return enumerate_outcomes(leak_all(config.network, prepare_phi0(config.n_sites)),
                              verbose_failures);
}

namespace {

double accepted_mass(const OutcomeSet& outcomes, const AcceptRule& accept) {
    double mass = 0.0;
    for (const Outcome& o : outcomes.outcomes)
        if (accept.accepts(o.pattern)) mass += o.probability;
    return mass;
}

TrialLog draw_until_accept(const OutcomeSet& outcomes, const AcceptRule& accept,
                           std::mt19937_64& engine, int max_attempts) {
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        double u = uniform01(engine);
        double cumulative = 0.0;
        for (const Outcome& o : outcomes.outcomes) {
            cumulative += o.probability;
            if (u < cumulative) {
                if (accept.accepts(o.pattern)) return {attempt, true, o.pattern};
                break;  // heralded the wrong pattern, try again
            }
        }
        // u beyond the pattern mass: the attempt failed outright
    }
    return {max_attempts, false, ""};
}

}  // namespace

MonteCarloResult monte_carlo_repeat(const OutcomeSet& outcomes, const AcceptRule& accept,
                                    std::uint64_t seed, int trials, int max_attempts) {
    if (trials < 1) throw ValidationError("trial count must be at least 1");
    if (max_attempts < 1) throw ValidationError("max attempts must be at least 1");
    if (accept.patterns.empty()) throw EmptyAcceptanceError("acceptance list is empty");
    if (accepted_mass(outcomes, accept) <= 0.0)
        throw EmptyAcceptanceError("no accepted pattern has nonzero probability");

    MonteCarloResult result;
    result.logs.reserve(trials);
    double total_attempts = 0.0;
    double accepted = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 engine = stream_engine(seed, static_cast<std::uint64_t>(trial) + 1);
        TrialLog log = draw_until_accept(outcomes, accept, engine, max_attempts);
        total_attempts += log.attempts;
        if (log.accepted) accepted += 1.0;
        result.logs.push_back(std::move(log));
    }
    result.mean_attempts = total_attempts / trials;
    result.acceptance_rate = accepted / total_attempts;
    return result;
}

FullResult run_full_protocol(const ProtocolConfig& config, int trials) {
    config.validate();
    if (!config.seed) throw ValidationError("the randomized protocol needs a seed");

    FullResult result;
    result.outcomes = enumerate_outcomes(config);
    if (accepted_mass(result.outcomes, config.accept) <= 0.0)
        throw EmptyAcceptanceError("no accepted pattern has nonzero probability");

    std::mt19937_64 engine = stream_engine(*config.seed, 0);
    TrialLog draw = draw_until_accept(result.outcomes, config.accept, engine, config.max_attempts);
    if (!draw.accepted)
        throw Error("the heralding run found no accepted pattern within " +
                    std::to_string(config.max_attempts) + " attempts");
    result.final.accepted_pattern = draw.pattern;
    result.final.attempts = draw.attempts;
    for (const Outcome& o : result.outcomes.outcomes)
        if (o.pattern == draw.pattern) result.final.state = run_mapping(*o.conditional);
    if (config.accept.text == "singlet")
        result.final.reference_fidelity = fidelity(result.final.state, photonic_singlet_reference());

    result.monte_carlo = monte_carlo_repeat(result.outcomes, config.accept, *config.seed, trials,
                                            config.max_attempts);
    return result;
}

StateVector run_mapping(const StateVector& psi) {
    for (const auto& [label, amp] : psi.amplitudes())
        if (!label.external.empty())
            throw ValidationError("mapping input must have empty external modes");
    StateVector out = psi;
    for (int site = 1; site <= psi.n_sites(); ++site) out = ideal_map_to_photon(site, out);
    for (int site = 1; site <= psi.n_sites(); ++site) out = leak_cavity_direct(site, out);
    return out;
}

StateVector singlet_reference() {
    double w = 1.0 / std::sqrt(2.0);
    SiteLabel up{AtomLevel::u_plus, 0, 0};
    SiteLabel um{AtomLevel::u_minus, 0, 0};
    StateVector psi(2);
    psi.set_amplitude(BasisLabel{{up, um}, {}}, Complex(w, 0.0));
    psi.set_amplitude(BasisLabel{{um, up}, {}}, Complex(-w, 0.0));
    return psi;
}

StateVector photonic_singlet_reference() {
    double w = 1.0 / std::sqrt(2.0);
    std::vector<SiteLabel> atoms(2, ground_site());
    StateVector psi(2);
    psi.set_amplitude(
        BasisLabel{atoms,
                   {{external_mode(1, Polarisation::plus), 1}, {external_mode(2, Polarisation::minus), 1}}},
        Complex(w, 0.0));
    psi.set_amplitude(
        BasisLabel{atoms,
                   {{external_mode(1, Polarisation::minus), 1}, {external_mode(2, Polarisation::plus), 1}}},
        Complex(-w, 0.0));
    return psi;
}

StateVector w_state_reference(int n_sites) {
    if (n_sites < 2) throw ValidationError("a W state needs at least two sites");
    double w = 1.0 / std::sqrt(static_cast<double>(n_sites));
    return w_state_reference(std::vector<Complex>(n_sites, Complex(w, 0.0)));
}

StateVector w_state_reference(const std::vector<Complex>& amplitudes) {
    int n = static_cast<int>(amplitudes.size());
    if (n < 2) throw ValidationError("a W state needs at least two sites");
    StateVector psi(n);
    for (int k = 0; k < n; ++k) {
        std::vector<SiteLabel> sites(n, SiteLabel{AtomLevel::u_minus, 0, 0});
        sites[k] = SiteLabel{AtomLevel::u_plus, 0, 0};
        psi.set_amplitude(BasisLabel{std::move(sites), {}}, amplitudes[k]);
    }
    if (std::abs(psi.norm() - 1.0) > kNormTolerance)
        throw ValidationError("reference amplitudes must be normalized");
    return psi;
}

namespace {

Json config_json(const ProtocolConfig& config, bool include_run) {
    Json j;
    j["n_sites"] = config.n_sites;
    j["network"] = config.network_label;
    j["accept"] = config.accept.text;
    j["accept_patterns"] = config.accept.patterns;
    if (include_run && config.seed)
        j["seed"] = *config.seed;
    else
        j["seed"] = nullptr;
    if (include_run)
        j["max_attempts"] = config.max_attempts;
    else
        j["max_attempts"] = nullptr;
    return j;
}

Json outcomes_json(const OutcomeSet& set) {
    Json arr = Json::array();
    for (const Outcome& o : set.outcomes) {
        Json entry;
        entry["pattern"] = o.pattern;
        entry["probability"] = o.probability;
        entry["state"] = o.conditional ? state_to_json(*o.conditional) : Json(nullptr);
        arr.push_back(std::move(entry));
    }
    return arr;
}

}  // namespace

Json outcome_report(const ProtocolConfig& config, const OutcomeSet& set) {
    Json j;
    j["config"] = config_json(config, false);
    j["outcomes"] = outcomes_json(set);
    j["failure_probability"] = set.failure_probability;
    return j;
}

Json full_report(const ProtocolConfig& config, const FullResult& result) {
    Json j;
    j["config"] = config_json(config, true);
    j["outcomes"] = outcomes_json(result.outcomes);
    j["failure_probability"] = result.outcomes.failure_probability;
    Json mc;
    mc["trials"] = static_cast<int>(result.monte_carlo.logs.size());
    mc["mean_attempts"] = result.monte_carlo.mean_attempts;
    j["monte_carlo"] = std::move(mc);
    Json fin;
    fin["accepted_pattern"] = result.final.accepted_pattern;
    fin["attempts"] = result.final.attempts;
    fin["reference_fidelity"] =
        result.final.reference_fidelity ? Json(*result.final.reference_fidelity) : Json(nullptr);
    fin["state"] = state_to_json(result.final.state);
    j["final"] = std::move(fin);
    return j;
}

}  // namespace cavnet
