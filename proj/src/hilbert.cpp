#include "cavnet/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavnet {

std::string to_string(AtomLevel level) {
    switch (level) {
        case AtomLevel::v: return "v";
        case AtomLevel::f: return "f";
        case AtomLevel::u_plus: return "u+";
        case AtomLevel::u_minus: return "u-";
        case AtomLevel::e_plus: return "e+";
        case AtomLevel::e_minus: return "e-";
    }
    throw ValidationError("invalid atomic level value");
}

std::string to_string(Polarisation pol) {
    return pol == Polarisation::plus ? "+" : "-";
}

AtomLevel atom_level_from_string(const std::string& text) {
    if (text == "v") return AtomLevel::v;
    if (text == "f") return AtomLevel::f;
    if (text == "u+") return AtomLevel::u_plus;
    if (text == "u-") return AtomLevel::u_minus;
    if (text == "e+") return AtomLevel::e_plus;
    if (text == "e-") return AtomLevel::e_minus;
    throw ValidationError("unknown atomic level '" + text + "'");
}

ModeId cavity_mode(int site, Polarisation pol) { return {ModeKind::cavity, site, pol}; }
ModeId external_mode(int site, Polarisation pol) { return {ModeKind::external, site, pol}; }
ModeId port_mode(int port, Polarisation pol) { return {ModeKind::port, port, pol}; }

StateVector::StateVector(int n_sites, double prune_epsilon)
    : m_nSites(n_sites), m_pruneEpsilon(prune_epsilon) {
    if (n_sites < 1) throw ValidationError("state needs at least one site");
    if (prune_epsilon < 0.0) throw ValidationError("prune epsilon must be non-negative");
}

void StateVector::check_label(const BasisLabel& label) const {
    if (static_cast<int>(label.sites.size()) != m_nSites)
        throw ValidationError("label has " + std::to_string(label.sites.size()) +
                              " sites, state has " + std::to_string(m_nSites));
    for (int i = 0; i < m_nSites; ++i) {
        const SiteLabel& s = label.sites[i];
        if (s.cavity_plus < 0 || s.cavity_minus < 0 ||
            s.cavity_plus > kCavityCutoff || s.cavity_minus > kCavityCutoff)
            throw ValidationError("cavity occupancy out of range at site " + std::to_string(i + 1));
    }
    for (const auto& [mode, count] : label.external) {
        if (mode.kind == ModeKind::cavity)
            throw ValidationError("cavity modes belong to site labels, not the external map");
        if (mode.index < 1 || mode.index > m_nSites)
            throw ValidationError("mode index " + std::to_string(mode.index) + " out of range");
        if (count <= 0)
            throw ValidationError("external occupancies are stored sparsely and must be positive");
    }
}

Complex StateVector::amplitude(const BasisLabel& label) const {
    auto it = m_amps.find(label);
    return it == m_amps.end() ? Complex(0.0, 0.0) : it->second;
}

void StateVector::set_amplitude(const BasisLabel& label, Complex value) {
    check_label(label);
    if (std::abs(value) < m_pruneEpsilon) {
        m_amps.erase(label);
    } else {
        m_amps[label] = value;
    }
}

void StateVector::add_amplitude(const BasisLabel& label, Complex value) {
    check_label(label);
    auto it = m_amps.find(label);
    Complex sum = (it == m_amps.end() ? Complex(0.0, 0.0) : it->second) + value;
    if (std::abs(sum) < m_pruneEpsilon) {
        if (it != m_amps.end()) m_amps.erase(it);
    } else {
        m_amps[label] = sum;
    }
}

double StateVector::norm() const {
    double sum = 0.0;
    for (const auto& [label, amp] : m_amps) sum += std::norm(amp);
    return std::sqrt(sum);
}

StateVector& StateVector::normalize() {
    double n = norm();
    if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
    for (auto& [label, amp] : m_amps) amp /= n;
    return *this;
}

StateVector StateVector::scaled(Complex factor) const {
    StateVector out(m_nSites, m_pruneEpsilon);
    for (const auto& [label, amp] : m_amps) out.set_amplitude(label, amp * factor);
    return out;
}

StateVector StateVector::operator+(const StateVector& other) const {
    if (other.m_nSites != m_nSites) throw ValidationError("system size mismatch");
    StateVector out = *this;
    for (const auto& [label, amp] : other.m_amps) out.add_amplitude(label, amp);
    return out;
}

StateVector StateVector::operator-(const StateVector& other) const {
    return *this + other.scaled(Complex(-1.0, 0.0));
}

StateVector make_product_state(const std::vector<SiteLabel>& site_states, double prune_epsilon) {
    if (site_states.empty()) throw ValidationError("state needs at least one site");
    StateVector psi(static_cast<int>(site_states.size()), prune_epsilon);
    psi.set_amplitude(BasisLabel{site_states, {}}, Complex(1.0, 0.0));
    return psi;
}

namespace {

int& site_count(SiteLabel& s, Polarisation pol) {
    return pol == Polarisation::plus ? s.cavity_plus : s.cavity_minus;
}

}  // namespace

StateVector apply_creation(const ModeId& mode, const StateVector& psi) {
    if (mode.index < 1 || mode.index > psi.n_sites())
        throw ValidationError("mode index " + std::to_string(mode.index) + " out of range");
    StateVector out(psi.n_sites(), psi.prune_epsilon());
    for (const auto& [label, amp] : psi.amplitudes()) {
        BasisLabel next = label;
        int n = 0;
        if (mode.kind == ModeKind::cavity) {
            int& count = site_count(next.sites[mode.index - 1], mode.pol);
            n = count;
            if (n + 1 > kCavityCutoff)
                throw ValidationError("cavity occupancy would exceed the cutoff at site " +
                                      std::to_string(mode.index));
            count = n + 1;
        } else {
            auto it = next.external.find(mode);
            n = it == next.external.end() ? 0 : it->second;
            next.external[mode] = n + 1;
        }
        out.add_amplitude(next, amp * std::sqrt(static_cast<double>(n + 1)));
    }
    return out;
}

StateVector apply_annihilation(const ModeId& mode, const StateVector& psi) {
    if (mode.index < 1 || mode.index > psi.n_sites())
        throw ValidationError("mode index " + std::to_string(mode.index) + " out of range");
    StateVector out(psi.n_sites(), psi.prune_epsilon());
    for (const auto& [label, amp] : psi.amplitudes()) {
        BasisLabel next = label;
        int n = 0;
        if (mode.kind == ModeKind::cavity) {
            int& count = site_count(next.sites[mode.index - 1], mode.pol);
            n = count;
            if (n == 0) continue;
            count = n - 1;
        } else {
            auto it = next.external.find(mode);
            if (it == next.external.end()) continue;
            n = it->second;
            if (n == 1) {
                next.external.erase(mode);
            } else {
                next.external[mode] = n - 1;
            }
        }
        out.add_amplitude(next, amp * std::sqrt(static_cast<double>(n)));
    }
    return out;
}

Complex inner_product(const StateVector& psi, const StateVector& phi) {
    if (psi.n_sites() != phi.n_sites()) throw ValidationError("system size mismatch");
    const auto& a = psi.amplitudes();
    const auto& b = phi.amplitudes();
    const bool aSmaller = a.size() <= b.size();
    const auto& small = aSmaller ? a : b;
    const auto& large = aSmaller ? b : a;
    Complex sum(0.0, 0.0);
    for (const auto& [label, amp] : small) {
        auto it = large.find(label);
        if (it == large.end()) continue;
        Complex left = aSmaller ? amp : it->second;
        Complex right = aSmaller ? it->second : amp;
        sum += std::conj(left) * right;
    }
    return sum;
}

double fidelity(const StateVector& psi, const StateVector& reference) {
    if (std::abs(psi.norm() - 1.0) > kNormTolerance ||
        std::abs(reference.norm() - 1.0) > kNormTolerance)
        throw ValidationError("fidelity requires normalized states");
    return std::norm(inner_product(reference, psi));
}

Projection project_onto_external_pattern(const StateVector& psi,
                                         const std::map<ModeId, int>& pattern) {
    std::map<ModeId, int> target;
    for (const auto& [mode, count] : pattern) {
        if (mode.kind == ModeKind::cavity)
            throw ValidationError("patterns address external and port modes only");
        if (mode.index < 1 || mode.index > psi.n_sites())
            throw ValidationError("pattern mode index out of range");
        if (count < 0) throw ValidationError("pattern occupancies must be non-negative");
        if (count > 0) target[mode] = count;
    }
    StateVector kept(psi.n_sites(), psi.prune_epsilon());
    double probability = 0.0;
    for (const auto& [label, amp] : psi.amplitudes()) {
        if (label.external != target) continue;
        probability += std::norm(amp);
        kept.add_amplitude(BasisLabel{label.sites, {}}, amp);
    }
    if (kept.is_zero()) return {0.0, std::nullopt};
    kept.normalize();
    return {probability, kept};
}

namespace {

std::string occupancy_pair(int plus, int minus) {
    return "(" + std::to_string(plus) + "," + std::to_string(minus) + ")";
}

// Parses "name=(a,b[,c])" segments of a canonical label string.
std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

int parse_int(const std::string& text) {
    try {
        std::size_t used = 0;
        int value = std::stoi(text, &used);
        if (used != text.size()) throw ValidationError("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ValidationError("malformed integer '" + text + "' in label");
    }
}

std::vector<std::string> parse_tuple(const std::string& segment, const std::string& prefix,
                                     int expected_index) {
    auto eq = segment.find('=');
    if (eq == std::string::npos || segment.size() < eq + 3 || segment[eq + 1] != '(' ||
        segment.back() != ')')
        throw ValidationError("malformed label segment '" + segment + "'");
    std::string name = segment.substr(0, eq);
    if (name != prefix + std::to_string(expected_index))
        throw ValidationError("label segment '" + segment + "' out of canonical order");
    return split(segment.substr(eq + 2, segment.size() - eq - 3), ',');
}

}  // namespace

std::string label_to_string(const BasisLabel& label, bool show_external, bool show_port) {
    const int n = static_cast<int>(label.sites.size());
    std::string out;
    for (int i = 0; i < n; ++i) {
        const SiteLabel& s = label.sites[i];
        if (i > 0) out += ";";
        out += "site" + std::to_string(i + 1) + "=(" + to_string(s.atom) + "," +
               std::to_string(s.cavity_plus) + "," + std::to_string(s.cavity_minus) + ")";
    }
    out += "|";
    auto occupancy = [&label](ModeKind kind, int index, Polarisation pol) {
        auto it = label.external.find(ModeId{kind, index, pol});
        return it == label.external.end() ? 0 : it->second;
    };
    bool first = true;
    auto append_group = [&](ModeKind kind, const std::string& prefix) {
        for (int i = 1; i <= n; ++i) {
            if (!first) out += ";";
            first = false;
            out += prefix + std::to_string(i) + "=" +
                   occupancy_pair(occupancy(kind, i, Polarisation::plus),
                                  occupancy(kind, i, Polarisation::minus));
        }
    };
    if (show_external) append_group(ModeKind::external, "ext");
    if (show_port) append_group(ModeKind::port, "port");
    return out;
}

BasisLabel label_from_string(const std::string& text) {
    auto bar = text.find('|');
    if (bar == std::string::npos) throw ValidationError("label is missing the '|' separator");
    BasisLabel label;
    for (std::size_t i = 0; const std::string& segment : split(text.substr(0, bar), ';')) {
        auto fields = parse_tuple(segment, "site", static_cast<int>(++i));
        if (fields.size() != 3) throw ValidationError("site segment needs (level,n+,n-)");
        label.sites.push_back(SiteLabel{atom_level_from_string(fields[0]), parse_int(fields[1]),
                                        parse_int(fields[2])});
    }
    if (label.sites.empty()) throw ValidationError("label has no sites");
    std::string rest = text.substr(bar + 1);
    if (!rest.empty()) {
        const int n = static_cast<int>(label.sites.size());
        auto segments = split(rest, ';');
        std::size_t pos = 0;
        for (ModeKind kind : {ModeKind::external, ModeKind::port}) {
            const std::string prefix = kind == ModeKind::external ? "ext" : "port";
            if (pos >= segments.size() || segments[pos].rfind(prefix + "1=", 0) != 0) continue;
            for (int i = 1; i <= n; ++i, ++pos) {
                if (pos >= segments.size())
                    throw ValidationError("label lists only part of the " + prefix + " modes");
                auto fields = parse_tuple(segments[pos], prefix, i);
                if (fields.size() != 2) throw ValidationError("mode segment needs (n+,n-)");
                int plus = parse_int(fields[0]);
                int minus = parse_int(fields[1]);
                if (plus < 0 || minus < 0) throw ValidationError("negative occupancy in label");
                if (plus > 0) label.external[ModeId{kind, i, Polarisation::plus}] = plus;
                if (minus > 0) label.external[ModeId{kind, i, Polarisation::minus}] = minus;
            }
        }
        if (pos != segments.size()) throw ValidationError("unrecognised mode segment '" +
                                                          segments[pos] + "'");
    }
    return label;
}

Json state_to_json(const StateVector& psi) {
    bool show_external = false;
    bool show_port = false;
    for (const auto& [label, amp] : psi.amplitudes()) {
        for (const auto& [mode, count] : label.external) {
            if (mode.kind == ModeKind::external) show_external = true;
            if (mode.kind == ModeKind::port) show_port = true;
        }
    }
    Json amplitudes = Json::array();
    for (const auto& [label, amp] : psi.amplitudes()) {
        amplitudes.push_back(Json{{"label", label_to_string(label, show_external, show_port)},
                                  {"re", amp.real()},
                                  {"im", amp.imag()}});
    }
    return Json{{"n_sites", psi.n_sites()}, {"amplitudes", amplitudes}};
}

StateVector state_from_json(const Json& doc) {
    if (!doc.is_object() || !doc.contains("n_sites") || !doc.contains("amplitudes"))
        throw ValidationError("state document needs 'n_sites' and 'amplitudes'");
    StateVector psi(doc.at("n_sites").get<int>());
    for (const auto& entry : doc.at("amplitudes")) {
        BasisLabel label = label_from_string(entry.at("label").get<std::string>());
        psi.set_amplitude(label,
                          Complex(entry.at("re").get<double>(), entry.at("im").get<double>()));
    }
    return psi;
}

}  // namespace cavnet
