#pragma once

// Brute-force reference for the heralded initialisation step, written against
// plain std:: types only. Every photon's route through the network is
// expanded as an explicit sum over port assignments with bosonic factors, so
// results here share no code with the state-vector engine.

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace path_oracle {

using cplx = std::complex<double>;
using Unitary = std::vector<std::vector<cplx>>;  // row = source site, column = port

struct PatternOutcome {
    double probability = 0.0;
    std::map<std::string, cplx> conditional;  // atomic configuration -> normalized amplitude
};

struct Enumeration {
    std::map<std::string, PatternOutcome> patterns;  // "+-" style detector patterns
    double failure = 0.0;  // mass on occupancies that are not one-per-port
    double total = 0.0;    // completeness check, should be 1
};

// Model: site i holds (|u+⟩ with a + photon + |u-⟩ with a - photon)/sqrt(2).
// A photon from site i reaches port j with amplitude u[i][j]. For a fixed
// atomic configuration and port assignment the path amplitude is
// 2^(-n/2) * prod_i u[i][a(i)], and landing k photons in one mode brings a
// sqrt(k!) factor from the repeated creation operators.
inline Enumeration enumerate_paths(const Unitary& u) {
    const int n = static_cast<int>(u.size());
    const double scale = std::pow(2.0, -0.5 * n);

    // occupancy key -> atomic configuration -> summed amplitude
    std::map<std::string, std::map<std::string, cplx>> groups;
    // occupancy key -> per-port (polarisation char, count) bookkeeping
    std::map<std::string, std::map<int, std::pair<char, int>>> shapes;

    for (int mask = 0; mask < (1 << n); ++mask) {
        std::string config(n, '+');
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) config[i] = '-';

        std::vector<int> assign(n, 0);
        while (true) {
            cplx amp = scale;
            for (int i = 0; i < n; ++i) amp *= u[i][assign[i]];

            std::map<std::pair<int, char>, int> occupancy;
            for (int i = 0; i < n; ++i) occupancy[{assign[i], config[i]}] += 1;

            double boson = 1.0;
            std::string key;
            std::map<int, std::pair<char, int>> shape;
            for (const auto& [mode, count] : occupancy) {
                double factorial = 1.0;
                for (int q = 2; q <= count; ++q) factorial *= q;
                boson *= std::sqrt(factorial);
                key += std::to_string(mode.first) + mode.second + std::to_string(count) + ";";
                auto& cell = shape[mode.first];
                cell = {mode.second, cell.second + count};
            }
            groups[key][config] += amp * boson;
            shapes[key] = std::move(shape);

            int pos = n - 1;
            while (pos >= 0) {
                if (++assign[pos] < n) break;
                assign[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }

    Enumeration result;
    for (const auto& [key, by_config] : groups) {
        double mass = 0.0;
        for (const auto& [config, amp] : by_config) mass += std::norm(amp);
        result.total += mass;

        const auto& shape = shapes[key];
        bool one_per_port = static_cast<int>(shape.size()) == n;
        std::string pattern(n, '?');
        if (one_per_port)
            for (const auto& [port, cell] : shape) {
                if (cell.second != 1) {
                    one_per_port = false;
                    break;
                }
                pattern[port] = cell.first;
            }
        if (!one_per_port) {
            result.failure += mass;
            continue;
        }

        PatternOutcome outcome;
        outcome.probability = mass;
        if (mass > 0.0)
            for (const auto& [config, amp] : by_config)
                outcome.conditional[config] = amp / std::sqrt(mass);
        result.patterns[pattern] = std::move(outcome);
    }
    return result;
}

}  // namespace path_oracle
