#pragma once

#include <compare>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cavnet/errors.hpp"

namespace cavnet {

using Complex = std::complex<double>;
using Json = nlohmann::ordered_json;

// Cavity modes hold at most one photon per polarisation. The protocol never
// injects more, so exceeding the cutoff is a logic error rather than physics.
inline constexpr int kCavityCutoff = 1;
inline constexpr double kDefaultPruneEpsilon = 1e-14;
inline constexpr double kNormTolerance = 1e-9;

enum class AtomLevel { v, f, u_plus, u_minus, e_plus, e_minus };
enum class Polarisation { plus, minus };
enum class ModeKind { cavity, external, port };

std::string to_string(AtomLevel level);
std::string to_string(Polarisation pol);
AtomLevel atom_level_from_string(const std::string& text);

// One bosonic mode: a cavity mode at a site, the free-space mode next to a
// site, or a network output port. Indices are 1-based.
struct ModeId {
    ModeKind kind = ModeKind::cavity;
    int index = 1;
    Polarisation pol = Polarisation::plus;

    auto operator<=>(const ModeId&) const = default;
};

ModeId cavity_mode(int site, Polarisation pol);
ModeId external_mode(int site, Polarisation pol);
ModeId port_mode(int port, Polarisation pol);

// Atomic level plus cavity occupation of a single site.
struct SiteLabel {
    AtomLevel atom = AtomLevel::v;
    int cavity_plus = 0;
    int cavity_minus = 0;

    auto operator<=>(const SiteLabel&) const = default;
};

// One classical configuration of the whole system: per-site atomic level and
// cavity occupancies plus occupancies of external/port modes. External
// occupancies are sparse; modes absent from the map are empty. The default
// comparison realises the canonical order: sites ascending, then external
// modes by (kind, index, polarisation) with plus before minus.
struct BasisLabel {
    std::vector<SiteLabel> sites;
    std::map<ModeId, int> external;

    auto operator<=>(const BasisLabel&) const = default;
};

// Sparse complex amplitude vector over basis labels, kept in canonical label
// order so iteration and serialization are deterministic. Amplitudes smaller
// in magnitude than prune_epsilon are dropped on insertion.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(int n_sites, double prune_epsilon = kDefaultPruneEpsilon);

    int n_sites() const { return m_nSites; }
    double prune_epsilon() const { return m_pruneEpsilon; }
    const std::map<BasisLabel, Complex>& amplitudes() const { return m_amps; }
    std::size_t size() const { return m_amps.size(); }
    bool is_zero() const { return m_amps.empty(); }

    Complex amplitude(const BasisLabel& label) const;
    void set_amplitude(const BasisLabel& label, Complex value);
    void add_amplitude(const BasisLabel& label, Complex value);

    double norm() const;
    StateVector& normalize();
    StateVector scaled(Complex factor) const;

    StateVector operator+(const StateVector& other) const;
    StateVector operator-(const StateVector& other) const;

private:
    void check_label(const BasisLabel& label) const;

    int m_nSites = 0;
    double m_pruneEpsilon = kDefaultPruneEpsilon;
    std::map<BasisLabel, Complex> m_amps;
};

// Single product basis state |site_1⟩|site_2⟩... with amplitude 1.
StateVector make_product_state(const std::vector<SiteLabel>& site_states,
                               double prune_epsilon = kDefaultPruneEpsilon);

// Bosonic ladder operators. Creation multiplies each amplitude by √(n+1) and
// raises the occupancy; cavity modes enforce the cutoff. Annihilation
// multiplies by √n and drops vacuum components (the zero vector is a legal
// unnormalized result).
StateVector apply_creation(const ModeId& mode, const StateVector& psi);
StateVector apply_annihilation(const ModeId& mode, const StateVector& psi);

// ⟨psi|phi⟩ with conjugation on the left argument.
Complex inner_product(const StateVector& psi, const StateVector& phi);

// |⟨reference|psi⟩|² for normalized states; invariant under global phase.
double fidelity(const StateVector& psi, const StateVector& reference);

struct Projection {
    double probability = 0.0;
    std::optional<StateVector> conditional;  // absent when probability is 0
};

// Projects onto the labels whose external occupancies match the pattern
// exactly, absorbs the matched photons (external occupancies reset to zero)
// and renormalizes.
Projection project_onto_external_pattern(const StateVector& psi,
                                         const std::map<ModeId, int>& pattern);

// Canonical text form, e.g. "site1=(u+,1,0);site2=(v,0,0)|port1=(0,1);port2=(0,0)".
// External/port groups are listed for all indices 1..n when shown.
std::string label_to_string(const BasisLabel& label, bool show_external, bool show_port);
BasisLabel label_from_string(const std::string& text);

// {"n_sites": int, "amplitudes": [{"label", "re", "im"}]} in canonical label
// order; lossless round trip.
Json state_to_json(const StateVector& psi);
StateVector state_from_json(const Json& doc);

}  // namespace cavnet
