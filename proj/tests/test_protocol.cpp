#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cavnet/protocol.hpp"
#include "support/path_oracle.hpp"

using namespace cavnet;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

path_oracle::Unitary oracle_identity(int n) {
    path_oracle::Unitary u(n, std::vector<path_oracle::cplx>(n, 0.0));
    for (int i = 0; i < n; ++i) u[i][i] = 1.0;
    return u;
}

path_oracle::Unitary oracle_bs5050() {
    double w = 1.0 / std::sqrt(2.0);
    return {{w, w}, {w, -w}};
}

path_oracle::Unitary oracle_dft(int n) {
    double w = 1.0 / std::sqrt(static_cast<double>(n));
    path_oracle::Unitary u(n, std::vector<path_oracle::cplx>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            u[j][k] = std::polar(w, 2.0 * std::numbers::pi * j * k / n);
    return u;
}

BasisLabel config_label(const std::string& config) {
    std::vector<SiteLabel> sites;
    for (char c : config)
        sites.push_back(SiteLabel{c == '+' ? AtomLevel::u_plus : AtomLevel::u_minus, 0, 0});
    return BasisLabel{std::move(sites), {}};
}

ProtocolConfig make_config(int n, const std::string& network, const std::string& accept) {
    ProtocolConfig cfg;
    cfg.n_sites = n;
    cfg.network_label = network;
    if (network == "identity")
        cfg.network = ScatteringMatrix::identity(n);
    else if (network == "bs5050")
        cfg.network = ScatteringMatrix::beamsplitter_50_50();
    else
        cfg.network = ScatteringMatrix::dft_multiport(n);
    cfg.accept = AcceptRule::parse(accept, n);
    return cfg;
}

// every probability and conditional amplitude against the path oracle
void check_against_oracle(const ProtocolConfig& cfg, const path_oracle::Unitary& u) {
    // the engine and the oracle must be fed the same matrix
    for (int r = 0; r < cfg.network.n(); ++r)
        for (int c = 0; c < cfg.network.n(); ++c)
            REQUIRE(std::abs(cfg.network.entry(r + 1, c + 1) -
                             Complex(u[r][c].real(), u[r][c].imag())) <= 1e-15);

    path_oracle::Enumeration expected = path_oracle::enumerate_paths(u);
    CHECK(expected.total == doctest::Approx(1.0).epsilon(1e-12));

    OutcomeSet set = enumerate_outcomes(cfg, true);
    REQUIRE(set.outcomes.size() == expected.patterns.size());
    double success = 0.0;
    for (const Outcome& o : set.outcomes) {
        const path_oracle::PatternOutcome& ref = expected.patterns.at(o.pattern);
        CHECK(std::abs(o.probability - ref.probability) <= 1e-12);
        success += o.probability;
        // below the cancellation floor both conditionals are renormalized
        // round-off noise, so only genuinely populated patterns are compared
        if (ref.probability > 1e-20) {
            REQUIRE(o.conditional.has_value());
            double support_mass = 0.0;
            for (const auto& [config, amp] : ref.conditional) {
                Complex engine_amp = o.conditional->amplitude(config_label(config));
                support_mass += std::norm(engine_amp);
                CHECK(std::abs(engine_amp - Complex(amp.real(), amp.imag())) <= 1e-12);
            }
            // the engine state has no support outside the oracle's configurations
            CHECK(support_mass == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    CHECK(std::abs(set.failure_probability - expected.failure) <= 1e-12);
    CHECK(success + set.failure_probability == doctest::Approx(1.0).epsilon(1e-10));

    double breakdown_mass = 0.0;
    for (const auto& [occupancy, mass] : set.failure_breakdown) breakdown_mass += mass;
    CHECK(std::abs(breakdown_mass - set.failure_probability) <= 1e-12);
}

}  // namespace

TEST_CASE("pattern enumeration is lexicographic") {
    CHECK(one_per_port_patterns(1) == std::vector<std::string>{"+", "-"});
    CHECK(one_per_port_patterns(2) == std::vector<std::string>{"++", "+-", "-+", "--"});
    CHECK(one_per_port_patterns(3).size() == 8);
    CHECK_THROWS_AS(one_per_port_patterns(0), ValidationError);
}

TEST_CASE("acceptance rules parse presets and explicit lists") {
    CHECK(AcceptRule::parse("all", 2).patterns.size() == 4);
    CHECK(AcceptRule::parse("singlet", 2).patterns == std::vector<std::string>{"+-", "-+"});
    CHECK_THROWS_AS(AcceptRule::parse("singlet", 3), ValidationError);
    CHECK(AcceptRule::parse("one-plus", 3).patterns ==
          std::vector<std::string>{"+--", "-+-", "--+"});

    AcceptRule custom = AcceptRule::parse("-+,+-", 2);
    CHECK(custom.patterns == std::vector<std::string>{"+-", "-+"});
    CHECK(custom.accepts("+-"));
    CHECK_FALSE(custom.accepts("++"));

    CHECK_THROWS_AS(AcceptRule::parse("+x", 2), ValidationError);
    CHECK_THROWS_AS(AcceptRule::parse("+-,+-", 2), ValidationError);
    CHECK_THROWS_AS(AcceptRule::parse("+-+", 2), ValidationError);
}

TEST_CASE("emission entangles each atom with its photon") {
    StateVector phi0 = prepare_phi0(1);
    CHECK(phi0.size() == 2);
    CHECK(phi0.amplitude(BasisLabel{{{AtomLevel::u_plus, 1, 0}}, {}}).real() ==
          doctest::Approx(kInvSqrt2));
    CHECK(phi0.amplitude(BasisLabel{{{AtomLevel::u_minus, 0, 1}}, {}}).real() ==
          doctest::Approx(kInvSqrt2));
    CHECK(prepare_phi0(3).size() == 8);
    CHECK(prepare_phi0(3).norm() == doctest::Approx(1.0));
}

TEST_CASE("outcome tables match the brute-force path oracle") {
    check_against_oracle(make_config(1, "identity", "all"), oracle_identity(1));
    check_against_oracle(make_config(2, "identity", "all"), oracle_identity(2));
    check_against_oracle(make_config(3, "identity", "all"), oracle_identity(3));
    check_against_oracle(make_config(2, "bs5050", "all"), oracle_bs5050());
    check_against_oracle(make_config(2, "dft", "all"), oracle_dft(2));
    check_against_oracle(make_config(3, "dft", "all"), oracle_dft(3));
}

TEST_CASE("interference strikes same-polarisation pairs from a 50:50 splitter") {
    OutcomeSet set = enumerate_outcomes(make_config(2, "bs5050", "all"));
    for (const Outcome& o : set.outcomes) {
        if (o.pattern == "++" || o.pattern == "--") {
            CHECK(o.probability <= 1e-12);
        } else {
            CHECK(o.probability == doctest::Approx(0.125).epsilon(1e-12));
        }
    }
    CHECK(set.failure_probability == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("heralding the cross patterns leaves the atoms in a singlet") {
    OutcomeSet set = enumerate_outcomes(make_config(2, "bs5050", "all"));
    StateVector singlet = singlet_reference();
    for (const Outcome& o : set.outcomes) {
        if (o.pattern != "+-" && o.pattern != "-+") continue;
        REQUIRE(o.conditional.has_value());
        CHECK(fidelity(*o.conditional, singlet) >= 1.0 - 1e-10);
    }
    // the (+,-) conditional is the singlet with an overall sign flip
    const Outcome& plus_minus = set.outcomes[1];
    REQUIRE(plus_minus.pattern == "+-");
    CHECK(plus_minus.conditional->amplitude(config_label("+-")).real() ==
          doctest::Approx(-kInvSqrt2));
    CHECK(plus_minus.conditional->amplitude(config_label("-+")).real() ==
          doctest::Approx(kInvSqrt2));
}

TEST_CASE("three sites through the Fourier multiport yield W states") {
    OutcomeSet set = enumerate_outcomes(make_config(3, "dft", "all"));
    double one_plus_mass = 0.0;
    for (const Outcome& o : set.outcomes) {
        if (std::count(o.pattern.begin(), o.pattern.end(), '+') != 1) continue;
        one_plus_mass += o.probability;
        CHECK(o.probability == doctest::Approx(1.0 / 72.0).epsilon(1e-12));
        REQUIRE(o.conditional.has_value());
        // exactly the three single-u+ configurations, uniform magnitude
        CHECK(o.conditional->size() == 3);
        for (const auto& [label, amp] : o.conditional->amplitudes())
            CHECK(std::abs(amp) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
    }
    CHECK(one_plus_mass == doctest::Approx(1.0 / 24.0).epsilon(1e-12));

    // phase pattern recorded from the path oracle for pattern (+,-,-)
    path_oracle::Enumeration expected = path_oracle::enumerate_paths(oracle_dft(3));
    const auto& ref = expected.patterns.at("+--").conditional;
    std::vector<Complex> phases;
    for (const std::string config : {"+--", "-+-", "--+"})
        phases.push_back(Complex(ref.at(config).real(), ref.at(config).imag()));
    StateVector w_ref = w_state_reference(phases);

    const Outcome& first = set.outcomes[3];  // "+--" in lexicographic order
    REQUIRE(first.pattern == "+--");
    CHECK(fidelity(*first.conditional, w_ref) >= 1.0 - 1e-10);
}

TEST_CASE("mapping turns the atomic singlet into the photonic one") {
    StateVector photonic = run_mapping(singlet_reference());
    CHECK(fidelity(photonic, photonic_singlet_reference()) >= 1.0 - 1e-12);
    // all atoms parked in the ground state
    for (const auto& [label, amp] : photonic.amplitudes())
        for (const SiteLabel& s : label.sites) {
            CHECK(s.atom == AtomLevel::v);
            CHECK(s.cavity_plus == 0);
            CHECK(s.cavity_minus == 0);
        }
}

TEST_CASE("mapping is linear and polarisation-swapping") {
    StateVector basis_pp = make_product_state({{AtomLevel::u_plus, 0, 0}, {AtomLevel::u_plus, 0, 0}});
    StateVector mapped_pp = run_mapping(basis_pp);
    BasisLabel all_minus{{{AtomLevel::v, 0, 0}, {AtomLevel::v, 0, 0}},
                         {{external_mode(1, Polarisation::minus), 1},
                          {external_mode(2, Polarisation::minus), 1}}};
    CHECK(mapped_pp.amplitude(all_minus) == Complex(1.0, 0.0));

    StateVector basis_mm =
        make_product_state({{AtomLevel::u_minus, 0, 0}, {AtomLevel::u_minus, 0, 0}});
    Complex alpha(0.6, 0.0);
    Complex beta(0.0, 0.8);
    StateVector combined = basis_pp.scaled(alpha) + basis_mm.scaled(beta);
    StateVector mapped = run_mapping(combined);
    StateVector expected = run_mapping(basis_pp).scaled(alpha) + run_mapping(basis_mm).scaled(beta);
    CHECK(mapped.size() == expected.size());
    for (const auto& [label, amp] : expected.amplitudes()) CHECK(mapped.amplitude(label) == amp);
}

TEST_CASE("mapping rejects states outside the qubit subspace") {
    CHECK_THROWS_AS(run_mapping(make_product_state({{AtomLevel::f, 0, 0}})), ValidationError);
    CHECK_THROWS_AS(run_mapping(make_product_state({{AtomLevel::u_plus, 1, 0}})), ValidationError);
    StateVector with_photon(1);
    with_photon.set_amplitude(
        BasisLabel{{{AtomLevel::u_plus, 0, 0}}, {{external_mode(1, Polarisation::plus), 1}}},
        Complex(1.0, 0.0));
    CHECK_THROWS_AS(run_mapping(with_photon), ValidationError);
}

TEST_CASE("reference states") {
    StateVector singlet = singlet_reference();
    CHECK(singlet.norm() == doctest::Approx(1.0));
    CHECK(singlet.amplitude(config_label("+-")).real() == doctest::Approx(kInvSqrt2));
    CHECK(singlet.amplitude(config_label("-+")).real() == doctest::Approx(-kInvSqrt2));

    StateVector w2 = w_state_reference(2);
    CHECK(w2.amplitude(config_label("+-")).real() == doctest::Approx(kInvSqrt2));
    CHECK(w2.amplitude(config_label("-+")).real() == doctest::Approx(kInvSqrt2));
    CHECK(fidelity(w2, singlet) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(w_state_reference(1), ValidationError);
    CHECK_THROWS_AS(w_state_reference({Complex(1.0, 0.0), Complex(1.0, 0.0)}), ValidationError);
}

TEST_CASE("monte carlo trials are reproducible and honest about caps") {
    OutcomeSet set = enumerate_outcomes(make_config(2, "bs5050", "all"));
    AcceptRule cross = AcceptRule::parse("singlet", 2);

    MonteCarloResult a = monte_carlo_repeat(set, cross, 42, 500, 1000);
    MonteCarloResult b = monte_carlo_repeat(set, cross, 42, 500, 1000);
    REQUIRE(a.logs.size() == 500);
    for (std::size_t i = 0; i < a.logs.size(); ++i) {
        CHECK(a.logs[i].attempts == b.logs[i].attempts);
        CHECK(a.logs[i].pattern == b.logs[i].pattern);
        CHECK(a.logs[i].accepted);
    }
    CHECK(a.mean_attempts == b.mean_attempts);
    CHECK(a.mean_attempts > 1.0);

    // a certain outcome accepts on the first draw, every time
    OutcomeSet sure = enumerate_outcomes(make_config(1, "identity", "all"));
    MonteCarloResult always = monte_carlo_repeat(sure, AcceptRule::parse("all", 1), 7, 50, 10);
    for (const TrialLog& log : always.logs) CHECK(log.attempts == 1);
    CHECK(always.acceptance_rate == doctest::Approx(1.0));

    // with a cap of one attempt, some trials must be flagged unaccepted
    MonteCarloResult capped = monte_carlo_repeat(set, cross, 42, 200, 1);
    int flagged = 0;
    for (const TrialLog& log : capped.logs)
        if (!log.accepted) ++flagged;
    CHECK(flagged > 0);
    CHECK(flagged < 200);

    // zero-probability acceptance is refused before sampling
    AcceptRule same_pol = AcceptRule::parse("++,--", 2);
    CHECK_THROWS_AS(monte_carlo_repeat(set, same_pol, 42, 10, 10), EmptyAcceptanceError);
}

TEST_CASE("the full protocol heralds and maps a photonic singlet") {
    ProtocolConfig cfg = make_config(2, "bs5050", "singlet");
    cfg.seed = 7;
    FullResult result = run_full_protocol(cfg, 2000);

    CHECK((result.final.accepted_pattern == "+-" || result.final.accepted_pattern == "-+"));
    CHECK(result.final.attempts >= 1);
    REQUIRE(result.final.reference_fidelity.has_value());
    CHECK(*result.final.reference_fidelity >= 1.0 - 1e-10);
    CHECK(result.monte_carlo.mean_attempts > 1.0);

    Json report = full_report(cfg, result);
    CHECK(report.at("config").at("seed") == 7);
    CHECK(report.at("config").at("accept") == "singlet");
    CHECK(report.at("outcomes").size() == 4);
    CHECK(report.at("monte_carlo").at("trials") == 2000);
    CHECK(report.at("final").at("reference_fidelity").get<double>() >= 1.0 - 1e-10);

    // identical configuration and seed give byte-identical reports
    FullResult again = run_full_protocol(cfg, 2000);
    CHECK(full_report(cfg, again).dump(2) == report.dump(2));

    cfg.seed.reset();
    CHECK_THROWS_AS(run_full_protocol(cfg, 10), ValidationError);
}

TEST_CASE("outcome reports carry the effective configuration") {
    ProtocolConfig cfg = make_config(2, "bs5050", "all");
    OutcomeSet set = enumerate_outcomes(cfg);
    Json report = outcome_report(cfg, set);
    CHECK(report.at("config").at("n_sites") == 2);
    CHECK(report.at("config").at("network") == "bs5050");
    CHECK(report.at("config").at("seed").is_null());
    CHECK(report.at("config").at("max_attempts").is_null());
    CHECK(report.at("failure_probability").get<double>() == doctest::Approx(0.75));
    CHECK(report.at("outcomes")[0].at("state").is_null());  // zero-probability pattern
}
