#pragma once

#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavnet/hilbert.hpp"

namespace cavnet {

// Rates of one atom-cavity system: coupling g, cavity decay kappa, decay
// gamma of the excited level |f⟩.
struct LambdaParams {
    double g = 1.0;
    double kappa = 0.0;
    double gamma = 0.0;

    void validate() const;
};

struct StrongCoupling {
    double ratio = 0.0;
    bool weak = false;  // advisory flag, set when ratio < 10
};

// g²/(κΓ); requires both decay rates positive.
StrongCoupling strong_coupling_ratio(const LambdaParams& p);

// Laser pulse envelope. The default "sin2" shape ramps monotonically from 0
// at t=0 to 1 at t=t_total, so the peak Rabi value is reached at the end of
// the run (the cavity coupling is on throughout, the counterintuitive order).
struct PulseProfile {
    std::string shape = "sin2";
    double omega_max = 0.0;
    double t_total = 0.0;
    int samples = 10000;

    double envelope(double t) const;  // in [0, 1]
    double omega(double t) const { return omega_max * envelope(t); }
    void validate() const;
};

// H(t) = static_part + envelope(t) * laser_part over an explicit label basis.
struct PulseHamiltonian {
    std::vector<BasisLabel> basis;
    Eigen::MatrixXcd static_part;
    Eigen::MatrixXcd laser_part;

    Eigen::MatrixXcd at_envelope(double s) const { return static_part + s * laser_part; }
    Eigen::MatrixXcd matrix() const { return at_envelope(1.0); }
};

// Three-level Λ system on span{|v,0⟩, |f,0⟩, |u,1⟩} with |u⟩ = |u+⟩ and the
// photon in the plus cavity mode. Both parameters enter as coupling
// amplitudes: the laser matrix element is omega and the cavity element is g,
// so the dark-state mixing angle is arctan(omega/g) and the bright
// eigenvalues are ±√(omega² + g²). (omega is half the conventional Rabi
// frequency of the v↔f transition.)
PulseHamiltonian build_lambda_hamiltonian(double omega, double g);

// cos θ |v,0⟩ − sin θ |u,1⟩ with tan θ = omega/g; the zero eigenvector of
// build_lambda_hamiltonian(omega, g).
StateVector dark_state(double omega, double g);

// Ideal STIRAP partial isometries, applied at one site and extended linearly.
// In strict mode (default) any support outside the operator domain is an
// error; the permissive flag instead annihilates out-of-domain amplitudes,
// which is lossy.
//
// emit superposition:  |v,0⟩ → (|u+,1+⟩ + |u−,1−⟩)/√2
// map to photon:       |u+,0⟩ → |v,1−⟩ and |u−,0⟩ → |v,1+⟩  (crossed)
// single map:          |v,0⟩ → |u,1⟩ in the three-level picture
StateVector ideal_emit_superposition(int site, const StateVector& psi, bool permissive = false);
StateVector ideal_map_to_photon(int site, const StateVector& psi, bool permissive = false);
StateVector ideal_single_map(int site, const StateVector& psi, bool permissive = false);

// Couplings of one site, keyed by the driven transition:
//   rabi:   "v" (v↔f), "u+" (u+↔e−), "u-" (u−↔e+)
//   cavity: "u+", "u-" (f↔u± emitting 1±), "e+", "e-" (e±↔v emitting 1±)
// Laser matrix elements are Ω_x/2 scaled by the pulse envelope; cavity
// elements are g_x and static.
struct SiteCouplings {
    std::map<std::string, Complex> rabi;
    std::map<std::string, double> cavity;
};

enum class Stage { ini, map, full };

// Hamiltonian of a single site for the given protocol stage:
//   ini:  span{|v,0⟩, |f,0⟩, |u+,1+⟩, |u−,1−⟩}
//   map:  span{|u+,0⟩, |u−,0⟩, |e±,0⟩, |v,1∓⟩}
//   full: every atomic level with cavity occupancies up to the cutoff
PulseHamiltonian build_site_hamiltonian(Stage stage, const SiteCouplings& couplings,
                                        const PulseProfile& profile);

// Time-resolved populations of a pulse-level run. Populations are raw
// |amplitude|², so with decay on they sum to the decreasing squared norm.
// max_excited_population is the peak total population of {f, e+, e−}.
struct Trajectory {
    std::vector<double> times;
    std::vector<BasisLabel> tracked;
    std::vector<std::vector<double>> populations;  // [instant][tracked index]
    std::vector<double> norms;
    StateVector final_state;
    double max_excited_population = 0.0;
    double emission_probability = 0.0;  // accumulated no-jump norm loss
};

// Fixed-step classical RK4 integration of i ψ̇ = H(t) ψ with step
// t_total/samples. Decay adds the non-Hermitian no-jump terms
// −i(κ/2)·(photon number) and −i(Γ/2)|f⟩⟨f|; the norm then decreases
// monotonically and the loss equals the accumulated emission probability.
// With decay off, a measured norm drift above 1e-6 raises an error advising
// more samples.
Trajectory evolve_pulse(const PulseHamiltonian& h, const StateVector& psi0,
                        const PulseProfile& profile,
                        const std::optional<LambdaParams>& decay = std::nullopt);

// CSV columns: time, pop_<label> per tracked label, norm. Header mandatory;
// floats carry 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace cavnet
