#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cavnet/hilbert.hpp"

namespace cavnet {

// Passive linear network routing photons from the cavities into the output
// ports. Row i gives the amplitudes with which a photon leaving cavity i is
// distributed over the ports; both polarisations see the same matrix.
class ScatteringMatrix {
public:
    static ScatteringMatrix identity(int n);
    static ScatteringMatrix beamsplitter_50_50();
    static ScatteringMatrix dft_multiport(int n);
    static ScatteringMatrix from_matrix(const Eigen::MatrixXcd& m);
    // interleaved row-major [re, im] pairs, n*n entries
    static ScatteringMatrix from_row_major(int n, const std::vector<std::array<double, 2>>& entries);

    int n() const { return static_cast<int>(m_matrix.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_matrix; }
    Complex entry(int row, int col) const;  // 1-based

private:
    explicit ScatteringMatrix(Eigen::MatrixXcd m) : m_matrix(std::move(m)) {}
    Eigen::MatrixXcd m_matrix;
};

constexpr double kUnitarityTolerance = 1e-12;

// Cavity photon at the given site leaks into the external mode with the same
// index, polarisation preserved.
StateVector leak_cavity_direct(int site, const StateVector& psi);

// Cavity photon at the given site leaks through the network and lands in a
// superposition over the output ports.
StateVector leak_cavity_through_network(const ScatteringMatrix& network, int site,
                                        const StateVector& psi);

// Releases every cavity photon through the network, sites in ascending order.
// Requires at most one cavity photon per site across the state's support.
StateVector leak_all(const ScatteringMatrix& network, const StateVector& psi);

}  // namespace cavnet
