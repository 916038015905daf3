#include "cavnet/optics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cavnet {

ScatteringMatrix ScatteringMatrix::identity(int n) {
    if (n < 1) throw ValidationError("network size must be at least 1");
    return ScatteringMatrix(Eigen::MatrixXcd::Identity(n, n));
}

ScatteringMatrix ScatteringMatrix::beamsplitter_50_50() {
    double w = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m(2, 2);
    m << Complex(w, 0.0), Complex(w, 0.0), Complex(w, 0.0), Complex(-w, 0.0);
    return ScatteringMatrix(std::move(m));
}

ScatteringMatrix ScatteringMatrix::dft_multiport(int n) {
    if (n < 1) throw ValidationError("network size must be at least 1");
    Eigen::MatrixXcd m(n, n);
    double w = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            m(j, k) = std::polar(w, 2.0 * std::numbers::pi * j * k / n);
    return ScatteringMatrix(std::move(m));
}

ScatteringMatrix ScatteringMatrix::from_matrix(const Eigen::MatrixXcd& m) {
    if (m.rows() < 1 || m.rows() != m.cols())
        throw ValidationError("scattering matrix must be square and non-empty");
    double residual =
        (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (residual > kUnitarityTolerance) {
        std::ostringstream msg;
        msg << "scattering matrix is not unitary (residual " << residual << ")";
        throw ValidationError(msg.str());
    }
    return ScatteringMatrix(m);
}

ScatteringMatrix ScatteringMatrix::from_row_major(int n,
                                                  const std::vector<std::array<double, 2>>& entries) {
    if (n < 1) throw ValidationError("network size must be at least 1");
    if (entries.size() != static_cast<std::size_t>(n) * n)
        throw ValidationError("expected " + std::to_string(n * n) + " matrix entries, got " +
                              std::to_string(entries.size()));
    Eigen::MatrixXcd m(n, n);
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col) {
            const auto& e = entries[static_cast<std::size_t>(row) * n + col];
            m(row, col) = Complex(e[0], e[1]);
        }
    return from_matrix(m);
}

Complex ScatteringMatrix::entry(int row, int col) const {
    if (row < 1 || row > n() || col < 1 || col > n())
        throw ValidationError("matrix index out of range");
    return m_matrix(row - 1, col - 1);
}

StateVector leak_cavity_direct(int site, const StateVector& psi) {
    if (site < 1 || site > psi.n_sites())
        throw ValidationError("site index " + std::to_string(site) + " out of range");
    StateVector out(psi.n_sites(), psi.prune_epsilon());
    for (Polarisation pol : {Polarisation::plus, Polarisation::minus}) {
        StateVector dropped = apply_annihilation(cavity_mode(site, pol), psi);
        out = out + apply_creation(external_mode(site, pol), dropped);
    }
    return out;
}

StateVector leak_cavity_through_network(const ScatteringMatrix& network, int site,
                                        const StateVector& psi) {
    if (network.n() != psi.n_sites())
        throw ValidationError("network size " + std::to_string(network.n()) +
                              " does not match the number of sites " +
                              std::to_string(psi.n_sites()));
    if (site < 1 || site > psi.n_sites())
        throw ValidationError("site index " + std::to_string(site) + " out of range");
    StateVector out(psi.n_sites(), psi.prune_epsilon());
    for (Polarisation pol : {Polarisation::plus, Polarisation::minus}) {
        StateVector dropped = apply_annihilation(cavity_mode(site, pol), psi);
        if (dropped.is_zero()) continue;
        for (int port = 1; port <= network.n(); ++port) {
            Complex weight = network.entry(site, port);
            if (weight == Complex(0.0, 0.0)) continue;
            out = out + apply_creation(port_mode(port, pol), dropped).scaled(weight);
        }
    }
    return out;
}

StateVector leak_all(const ScatteringMatrix& network, const StateVector& psi) {
    if (network.n() != psi.n_sites())
        throw ValidationError("network size " + std::to_string(network.n()) +
                              " does not match the number of sites " +
                              std::to_string(psi.n_sites()));
    for (const auto& [label, amp] : psi.amplitudes()) {
        for (int site = 1; site <= psi.n_sites(); ++site) {
            const SiteLabel& s = label.sites[site - 1];
            if (s.cavity_plus + s.cavity_minus > 1)
                throw ValidationError("leak_all requires at most one cavity photon per site; site " +
                                      std::to_string(site) + " holds more");
        }
    }
    StateVector out = psi;
    for (int site = 1; site <= psi.n_sites(); ++site) {
        // split into the part with a photon at this site (leaks) and the rest
        StateVector with_photon(out.n_sites(), out.prune_epsilon());
        StateVector without(out.n_sites(), out.prune_epsilon());
        for (const auto& [label, amp] : out.amplitudes()) {
            const SiteLabel& s = label.sites[site - 1];
            if (s.cavity_plus + s.cavity_minus > 0)
                with_photon.set_amplitude(label, amp);
            else
                without.set_amplitude(label, amp);
        }
        out = without + leak_cavity_through_network(network, site, with_photon);
    }
    return out;
}

}  // namespace cavnet
