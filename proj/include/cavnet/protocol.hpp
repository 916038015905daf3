#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cavnet/optics.hpp"
#include "cavnet/stirap.hpp"

namespace cavnet {

// State right after every site has emitted: each atom is entangled with one
// cavity photon, (|u+,1+⟩ + |u-,1-⟩)/sqrt(2) per site.
StateVector prepare_phi0(int n_sites, double prune_epsilon = kDefaultPruneEpsilon);

// All 2^n detector patterns with exactly one photon per port, as strings of
// '+' and '-' (port order ascending), listed lexicographically.
std::vector<std::string> one_per_port_patterns(int n_sites);

// The external-mode occupancy a pattern string describes.
std::map<ModeId, int> pattern_to_modes(const std::string& pattern);

// Which detector patterns count as heralding success.
struct AcceptRule {
    std::string text;                   // the rule as written
    std::vector<std::string> patterns;  // matching patterns, lexicographic

    // "all", "singlet", "one-plus", or a comma-separated pattern list
    static AcceptRule parse(const std::string& text, int n_sites);
    bool accepts(const std::string& pattern) const;
};

struct ProtocolConfig {
    int n_sites = 2;
    std::string network_label = "bs5050";
    ScatteringMatrix network = ScatteringMatrix::beamsplitter_50_50();
    AcceptRule accept;
    std::optional<std::uint64_t> seed;
    int max_attempts = 1000;

    void validate() const;
};

struct Outcome {
    std::string pattern;
    double probability = 0.0;
    std::optional<StateVector> conditional;
};

struct OutcomeSet {
    std::vector<Outcome> outcomes;     // one entry per pattern, report order
    double failure_probability = 0.0;  // mass outside one-photon-per-port
    // per-occupancy breakdown of the failure mass, filled on request
    std::vector<std::pair<std::string, double>> failure_breakdown;
};

// Measures every detector pattern on the fully leaked state. The failure
// probability is summed directly from the non-heralding part of the state,
// not inferred from the pattern probabilities, so completeness stays a real
// check. verbose_failures additionally lists the failing occupancies.
OutcomeSet enumerate_outcomes(const StateVector& leaked, bool verbose_failures = false);

// prepare_phi0, leak_all, measurement in one go.
OutcomeSet enumerate_outcomes(const ProtocolConfig& config, bool verbose_failures = false);

// One repeat-until-success run. A trial that never heralds an accepted
// pattern within max_attempts is flagged, not an error.
struct TrialLog {
    int attempts = 0;
    bool accepted = false;
    std::string pattern;  // empty when not accepted
};

struct MonteCarloResult {
    std::vector<TrialLog> logs;
    double mean_attempts = 0.0;    // over all trials, capped trials count in full
    double acceptance_rate = 0.0;  // accepted draws over total draws
};

// Draws detector patterns until an accepted one comes up (or the attempt cap
// is hit), independently for each trial. Trial t uses its own substream of
// the seed, so results do not depend on evaluation order.
MonteCarloResult monte_carlo_repeat(const OutcomeSet& outcomes, const AcceptRule& accept,
                                    std::uint64_t seed, int trials, int max_attempts);

struct FinalRun {
    std::string accepted_pattern;
    int attempts = 0;
    std::optional<double> reference_fidelity;  // against the photonic singlet
    StateVector state;                         // after the photon mapping
};

struct FullResult {
    OutcomeSet outcomes;
    MonteCarloResult monte_carlo;
    FinalRun final;
};

// Full pipeline: exact outcome table, Monte Carlo attempt statistics, and one
// heralding run whose conditional state is mapped onto flying photons.
FullResult run_full_protocol(const ProtocolConfig& config, int trials);

// Maps every atomic qubit onto a photon (u+ -> 1-, u- -> 1+) and releases it
// into the site's external mode; atoms end up in v with empty cavities. The
// input must live in the atomic qubit subspace.
StateVector run_mapping(const StateVector& psi);

// (|u+,u-⟩ - |u-,u+⟩)/sqrt(2), empty cavities.
StateVector singlet_reference();

// The mapped counterpart: atoms in v, one + photon in external mode 1 and
// one - photon in external mode 2 minus the swapped term, 1/sqrt(2) each.
StateVector photonic_singlet_reference();

// Equal-weight single-excitation state: site k carries u+ against a u-
// background, amplitude 1/sqrt(n); the overload sets the amplitudes directly.
StateVector w_state_reference(int n_sites);
StateVector w_state_reference(const std::vector<Complex>& amplitudes);

Json outcome_report(const ProtocolConfig& config, const OutcomeSet& set);
Json full_report(const ProtocolConfig& config, const FullResult& result);

}  // namespace cavnet
