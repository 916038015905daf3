#include "cavnet/stirap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace cavnet {

void LambdaParams::validate() const {
    if (g <= 0.0) throw ValidationError("coupling g must be positive");
    if (kappa < 0.0 || gamma < 0.0) throw ValidationError("decay rates must be non-negative");
}

StrongCoupling strong_coupling_ratio(const LambdaParams& p) {
    p.validate();
    if (p.kappa == 0.0 || p.gamma == 0.0)
        throw ValidationError("strong-coupling ratio is undefined for kappa = 0 or gamma = 0");
    double ratio = p.g * p.g / (p.kappa * p.gamma);
    return {ratio, ratio < 10.0};
}

double PulseProfile::envelope(double t) const {
    if (shape != "sin2") throw ValidationError("unknown pulse shape '" + shape + "'");
    if (t <= 0.0) return 0.0;
    if (t >= t_total) return 1.0;
    double s = std::sin(std::numbers::pi * t / (2.0 * t_total));
    return s * s;
}

void PulseProfile::validate() const {
    if (shape != "sin2") throw ValidationError("unknown pulse shape '" + shape + "'");
    if (t_total <= 0.0) throw ValidationError("pulse duration must be positive");
    if (omega_max < 0.0) throw ValidationError("peak Rabi frequency must be non-negative");
    if (samples < 100)
        throw ValidationError("step too coarse: at least 100 samples are required");
}

namespace {

BasisLabel one_site(AtomLevel atom, int plus, int minus) {
    return BasisLabel{{SiteLabel{atom, plus, minus}}, {}};
}

int index_of(const std::vector<BasisLabel>& basis, const BasisLabel& label) {
    auto it = std::find(basis.begin(), basis.end(), label);
    if (it == basis.end()) throw ValidationError("label not in Hamiltonian basis");
    return static_cast<int>(it - basis.begin());
}

void add_hermitian(Eigen::MatrixXcd& m, int row, int col, Complex value) {
    m(row, col) += value;
    m(col, row) += std::conj(value);
}

bool is_excited(AtomLevel level) {
    return level == AtomLevel::f || level == AtomLevel::e_plus || level == AtomLevel::e_minus;
}

}  // namespace

PulseHamiltonian build_lambda_hamiltonian(double omega, double g) {
    PulseHamiltonian h;
    h.basis = {one_site(AtomLevel::v, 0, 0), one_site(AtomLevel::f, 0, 0),
               one_site(AtomLevel::u_plus, 1, 0)};
    h.static_part = Eigen::MatrixXcd::Zero(3, 3);
    h.laser_part = Eigen::MatrixXcd::Zero(3, 3);
    add_hermitian(h.laser_part, 1, 0, Complex(omega, 0.0));  // |f,0⟩⟨v,0|
    add_hermitian(h.static_part, 1, 2, Complex(g, 0.0));     // |f,0⟩⟨u,1|
    return h;
}

StateVector dark_state(double omega, double g) {
    if (omega == 0.0 && g == 0.0)
        throw ValidationError("dark state is undefined for omega = g = 0");
    double r = std::hypot(omega, g);
    StateVector psi(1);
    psi.set_amplitude(one_site(AtomLevel::v, 0, 0), Complex(g / r, 0.0));
    psi.set_amplitude(one_site(AtomLevel::u_plus, 1, 0), Complex(-omega / r, 0.0));
    return psi;
}

namespace {

// Linear extension of a per-site label rewrite. Each domain site label maps
// to a weighted set of replacement site labels; the weights form an isometry.
StateVector apply_site_isometry(
    int site, const StateVector& psi, bool permissive,
    const std::map<SiteLabel, std::vector<std::pair<SiteLabel, Complex>>>& rules,
    const std::string& op_name) {
    if (site < 1 || site > psi.n_sites())
        throw ValidationError("site index " + std::to_string(site) + " out of range");
    StateVector out(psi.n_sites(), psi.prune_epsilon());
    for (const auto& [label, amp] : psi.amplitudes()) {
        auto rule = rules.find(label.sites[site - 1]);
        if (rule == rules.end()) {
            if (permissive) continue;
            throw ValidationError(op_name + ": site " + std::to_string(site) +
                                  " has support outside the operator domain");
        }
        for (const auto& [replacement, weight] : rule->second) {
            BasisLabel next = label;
            next.sites[site - 1] = replacement;
            out.add_amplitude(next, amp * weight);
        }
    }
    return out;
}

}  // namespace

StateVector ideal_emit_superposition(int site, const StateVector& psi, bool permissive) {
    static const double w = 1.0 / std::sqrt(2.0);
    static const std::map<SiteLabel, std::vector<std::pair<SiteLabel, Complex>>> rules = {
        {SiteLabel{AtomLevel::v, 0, 0},
         {{SiteLabel{AtomLevel::u_plus, 1, 0}, Complex(w, 0.0)},
          {SiteLabel{AtomLevel::u_minus, 0, 1}, Complex(w, 0.0)}}},
    };
    return apply_site_isometry(site, psi, permissive, rules, "emit superposition");
}

StateVector ideal_map_to_photon(int site, const StateVector& psi, bool permissive) {
    static const std::map<SiteLabel, std::vector<std::pair<SiteLabel, Complex>>> rules = {
        {SiteLabel{AtomLevel::u_plus, 0, 0}, {{SiteLabel{AtomLevel::v, 0, 1}, Complex(1.0, 0.0)}}},
        {SiteLabel{AtomLevel::u_minus, 0, 0}, {{SiteLabel{AtomLevel::v, 1, 0}, Complex(1.0, 0.0)}}},
    };
    return apply_site_isometry(site, psi, permissive, rules, "map to photon");
}

StateVector ideal_single_map(int site, const StateVector& psi, bool permissive) {
    static const std::map<SiteLabel, std::vector<std::pair<SiteLabel, Complex>>> rules = {
        {SiteLabel{AtomLevel::v, 0, 0}, {{SiteLabel{AtomLevel::u_plus, 1, 0}, Complex(1.0, 0.0)}}},
    };
    return apply_site_isometry(site, psi, permissive, rules, "single map");
}

namespace {

void require_keys(const std::string& stage, const std::map<std::string, Complex>& rabi,
                  const std::map<std::string, double>& cavity,
                  const std::vector<std::string>& rabi_keys,
                  const std::vector<std::string>& cavity_keys) {
    auto check = [&stage](const auto& given, const std::vector<std::string>& wanted,
                          const std::string& family) {
        for (const auto& [key, value] : given) {
            if (std::find(wanted.begin(), wanted.end(), key) == wanted.end())
                throw ValidationError(family + " coupling '" + key + "' does not participate in the " +
                                      stage + " stage");
        }
        for (const std::string& key : wanted) {
            if (!given.count(key))
                throw ValidationError(stage + " stage needs the " + family + " coupling '" + key + "'");
        }
    };
    check(rabi, rabi_keys, "laser");
    check(cavity, cavity_keys, "cavity");
}

const std::vector<std::string> kAllRabi = {"v", "u+", "u-"};
const std::vector<std::string> kAllCavity = {"u+", "u-", "e+", "e-"};

}  // namespace

PulseHamiltonian build_site_hamiltonian(Stage stage, const SiteCouplings& couplings,
                                        const PulseProfile& profile) {
    profile.validate();
    for (const auto& [key, value] : couplings.rabi)
        if (std::find(kAllRabi.begin(), kAllRabi.end(), key) == kAllRabi.end())
            throw ValidationError("unknown laser transition '" + key + "'");
    for (const auto& [key, value] : couplings.cavity)
        if (std::find(kAllCavity.begin(), kAllCavity.end(), key) == kAllCavity.end())
            throw ValidationError("unknown cavity transition '" + key + "'");

    PulseHamiltonian h;
    if (stage == Stage::ini) {
        require_keys("ini", couplings.rabi, couplings.cavity, {"v"}, {"u+", "u-"});
        h.basis = {one_site(AtomLevel::v, 0, 0), one_site(AtomLevel::f, 0, 0),
                   one_site(AtomLevel::u_plus, 1, 0), one_site(AtomLevel::u_minus, 0, 1)};
        h.static_part = Eigen::MatrixXcd::Zero(4, 4);
        h.laser_part = Eigen::MatrixXcd::Zero(4, 4);
        add_hermitian(h.laser_part, 1, 0, couplings.rabi.at("v") / 2.0);
        add_hermitian(h.static_part, 2, 1, Complex(couplings.cavity.at("u+"), 0.0));
        add_hermitian(h.static_part, 3, 1, Complex(couplings.cavity.at("u-"), 0.0));
        return h;
    }
    if (stage == Stage::map) {
        require_keys("map", couplings.rabi, couplings.cavity, {"u+", "u-"}, {"e+", "e-"});
        h.basis = {one_site(AtomLevel::u_plus, 0, 0),  one_site(AtomLevel::u_minus, 0, 0),
                   one_site(AtomLevel::e_minus, 0, 0), one_site(AtomLevel::e_plus, 0, 0),
                   one_site(AtomLevel::v, 0, 1),       one_site(AtomLevel::v, 1, 0)};
        h.static_part = Eigen::MatrixXcd::Zero(6, 6);
        h.laser_part = Eigen::MatrixXcd::Zero(6, 6);
        add_hermitian(h.laser_part, 2, 0, couplings.rabi.at("u+") / 2.0);  // u+ ↔ e−
        add_hermitian(h.laser_part, 3, 1, couplings.rabi.at("u-") / 2.0);  // u− ↔ e+
        add_hermitian(h.static_part, 4, 2, Complex(couplings.cavity.at("e-"), 0.0));  // e− ↔ v,1−
        add_hermitian(h.static_part, 5, 3, Complex(couplings.cavity.at("e+"), 0.0));  // e+ ↔ v,1+
        return h;
    }

    // full: every atomic level with cavity occupancies up to the cutoff,
    // couplings optional (missing ones are simply absent).
    std::vector<BasisLabel> basis;
    for (AtomLevel atom : {AtomLevel::v, AtomLevel::f, AtomLevel::u_plus, AtomLevel::u_minus,
                           AtomLevel::e_plus, AtomLevel::e_minus})
        for (int p = 0; p <= kCavityCutoff; ++p)
            for (int m = 0; m <= kCavityCutoff; ++m) basis.push_back(one_site(atom, p, m));
    std::sort(basis.begin(), basis.end());
    const int dim = static_cast<int>(basis.size());
    h.basis = basis;
    h.static_part = Eigen::MatrixXcd::Zero(dim, dim);
    h.laser_part = Eigen::MatrixXcd::Zero(dim, dim);

    auto rabi = [&couplings](const std::string& key) {
        auto it = couplings.rabi.find(key);
        return it == couplings.rabi.end() ? Complex(0.0, 0.0) : it->second;
    };
    auto cavity = [&couplings](const std::string& key) {
        auto it = couplings.cavity.find(key);
        return it == couplings.cavity.end() ? 0.0 : it->second;
    };

    for (int p = 0; p <= kCavityCutoff; ++p) {
        for (int m = 0; m <= kCavityCutoff; ++m) {
            auto at = [&](AtomLevel atom) { return index_of(basis, one_site(atom, p, m)); };
            // laser terms preserve the cavity occupancies
            if (rabi("v") != 0.0)
                add_hermitian(h.laser_part, at(AtomLevel::f), at(AtomLevel::v), rabi("v") / 2.0);
            if (rabi("u+") != 0.0)
                add_hermitian(h.laser_part, at(AtomLevel::e_minus), at(AtomLevel::u_plus),
                              rabi("u+") / 2.0);
            if (rabi("u-") != 0.0)
                add_hermitian(h.laser_part, at(AtomLevel::e_plus), at(AtomLevel::u_minus),
                              rabi("u-") / 2.0);
            // cavity terms raise one occupancy; transitions over the cutoff
            // are outside the truncated space and omitted
            if (p < kCavityCutoff) {
                double factor = std::sqrt(static_cast<double>(p + 1));
                if (cavity("u+") != 0.0)
                    add_hermitian(h.static_part, index_of(basis, one_site(AtomLevel::u_plus, p + 1, m)),
                                  at(AtomLevel::f), Complex(cavity("u+") * factor, 0.0));
                if (cavity("e+") != 0.0)
                    add_hermitian(h.static_part, index_of(basis, one_site(AtomLevel::v, p + 1, m)),
                                  at(AtomLevel::e_plus), Complex(cavity("e+") * factor, 0.0));
            }
            if (m < kCavityCutoff) {
                double factor = std::sqrt(static_cast<double>(m + 1));
                if (cavity("u-") != 0.0)
                    add_hermitian(h.static_part, index_of(basis, one_site(AtomLevel::u_minus, p, m + 1)),
                                  at(AtomLevel::f), Complex(cavity("u-") * factor, 0.0));
                if (cavity("e-") != 0.0)
                    add_hermitian(h.static_part, index_of(basis, one_site(AtomLevel::v, p, m + 1)),
                                  at(AtomLevel::e_minus), Complex(cavity("e-") * factor, 0.0));
            }
        }
    }
    return h;
}

Trajectory evolve_pulse(const PulseHamiltonian& h, const StateVector& psi0,
                        const PulseProfile& profile, const std::optional<LambdaParams>& decay) {
    profile.validate();
    if (decay) decay->validate();
    const int dim = static_cast<int>(h.basis.size());
    if (h.static_part.rows() != dim || h.laser_part.rows() != dim)
        throw ValidationError("Hamiltonian matrices do not match the basis size");
    if (std::abs(psi0.norm() - 1.0) > kNormTolerance)
        throw ValidationError("initial state must be normalized");

    std::map<BasisLabel, int> index;
    for (int i = 0; i < dim; ++i) index[h.basis[i]] = i;
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(dim);
    for (const auto& [label, amp] : psi0.amplitudes()) {
        auto it = index.find(label);
        if (it == index.end())
            throw ValidationError("initial state has support outside the Hamiltonian basis");
        y(it->second) = amp;
    }

    // no-jump damping rates per basis label
    Eigen::VectorXd damping = Eigen::VectorXd::Zero(dim);
    if (decay) {
        for (int i = 0; i < dim; ++i) {
            const BasisLabel& label = h.basis[i];
            int photons = 0;
            for (const SiteLabel& s : label.sites) photons += s.cavity_plus + s.cavity_minus;
            for (const auto& [mode, count] : label.external) photons += count;
            double rate = decay->kappa * photons;
            for (const SiteLabel& s : label.sites)
                if (s.atom == AtomLevel::f) rate += decay->gamma;
            damping(i) = rate;
        }
    }
    const bool damped = decay && (decay->kappa > 0.0 || decay->gamma > 0.0);

    const double dt = profile.t_total / profile.samples;
    const Complex minus_i(0.0, -1.0);
    auto rhs = [&](double t, const Eigen::VectorXcd& state, double& emission_rate) {
        Eigen::VectorXcd d = minus_i * (h.at_envelope(profile.envelope(t)) * state);
        if (damped) {
            d -= 0.5 * damping.cast<Complex>().cwiseProduct(state);
            emission_rate = damping.dot(state.cwiseAbs2());
        } else {
            emission_rate = 0.0;
        }
        return d;
    };

    Trajectory trajectory;
    trajectory.tracked = h.basis;
    trajectory.times.reserve(profile.samples + 1);
    trajectory.populations.reserve(profile.samples + 1);
    trajectory.norms.reserve(profile.samples + 1);

    double emission = 0.0;
    double max_excited = 0.0;
    double max_drift = 0.0;

    auto record = [&](double t) {
        trajectory.times.push_back(t);
        std::vector<double> pops(dim);
        double excited = 0.0;
        for (int i = 0; i < dim; ++i) {
            pops[i] = std::norm(y(i));
            for (const SiteLabel& s : h.basis[i].sites)
                if (is_excited(s.atom)) {
                    excited += pops[i];
                    break;
                }
        }
        double nrm = y.norm();
        trajectory.populations.push_back(std::move(pops));
        trajectory.norms.push_back(nrm);
        max_excited = std::max(max_excited, excited);
        if (!damped) max_drift = std::max(max_drift, std::abs(nrm - 1.0));
    };

    record(0.0);
    for (int step = 0; step < profile.samples; ++step) {
        double t = step * dt;
        double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
        Eigen::VectorXcd k1 = rhs(t, y, r1);
        Eigen::VectorXcd k2 = rhs(t + dt / 2.0, y + (dt / 2.0) * k1, r2);
        Eigen::VectorXcd k3 = rhs(t + dt / 2.0, y + (dt / 2.0) * k2, r3);
        Eigen::VectorXcd k4 = rhs(t + dt, y + dt * k3, r4);
        y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        emission += (dt / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
        record((step + 1) * dt);
    }

    if (!damped && max_drift > 1e-6)
        throw ValidationError("step too coarse: norm drift " + std::to_string(max_drift) +
                              " exceeds 1e-6, increase samples");

    StateVector final_state(psi0.n_sites(), psi0.prune_epsilon());
    for (int i = 0; i < dim; ++i) final_state.set_amplitude(h.basis[i], y(i));
    trajectory.final_state = final_state;
    trajectory.max_excited_population = max_excited;
    trajectory.emission_probability = damped ? emission : 0.0;
    return trajectory;
}

namespace {

std::string format_17g(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

}  // namespace

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "time";
    for (const BasisLabel& label : trajectory.tracked)
        out << ",\"pop_" << label_to_string(label, false, false) << "\"";
    out << ",norm\n";
    for (std::size_t row = 0; row < trajectory.times.size(); ++row) {
        out << format_17g(trajectory.times[row]);
        for (double value : trajectory.populations[row]) out << "," << format_17g(value);
        out << "," << format_17g(trajectory.norms[row]) << "\n";
    }
}

}  // namespace cavnet
