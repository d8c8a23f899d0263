#pragma once

// Reference implementations used only by the tests. None of them call into
// the library code paths they are compared against.

#include "qcmps/circuit_blocks.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/pauli.hpp"

#include <Eigen/Dense>

#include <bit>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(QCMPS_FIXTURE_DIR) / name;
}

// Single-site Pauli matrices.
inline MatrixXcd pauli(char c) {
    MatrixXcd m(2, 2);
    switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
    }
    return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Kronecker product with site n-1 as the most significant factor, so bit k of
// the basis index is site k.
inline MatrixXcd string_matrix(const std::string& letters) {
    MatrixXcd m = MatrixXcd::Identity(1, 1);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        m = kron(m, pauli(*it));
    return m;
}

inline std::string letters_of(const qcmps::PauliString& s, std::size_t n) {
    std::string out(n, 'I');
    for (const auto& [site, letter] : s.factors())
        out[site] = qcmps::to_char(letter);
    return out;
}

inline MatrixXcd polynomial_matrix(const qcmps::PauliPolynomial& p) {
    const std::size_t n = p.n_sites();
    MatrixXcd m = MatrixXcd::Zero(Eigen::Index(1) << n, Eigen::Index(1) << n);
    for (const auto& t : p.terms())
        m += t.coeff * string_matrix(letters_of(t.string, n));
    return m;
}

// Fermionic operators acting on occupation-number basis states directly.
// Mode k is bit k; a+_k picks up (-1)^(number of occupied modes below k).
inline MatrixXcd creation(std::size_t k, std::size_t n) {
    const std::size_t dim = std::size_t{1} << n;
    MatrixXcd m = MatrixXcd::Zero(dim, dim);
    for (std::size_t b = 0; b < dim; ++b) {
        if (b >> k & 1)
            continue;
        const int below = std::popcount(b & ((std::size_t{1} << k) - 1));
        m(b | (std::size_t{1} << k), b) = below % 2 ? -1.0 : 1.0;
    }
    return m;
}

inline std::size_t site_of(std::size_t orb, int spin, std::size_t n_orb, bool interleaved) {
    return interleaved ? 2 * orb + spin : orb + spin * n_orb;
}

// Second-quantized molecular Hamiltonian from spatial integrals:
// E_core + sum h_pq a+_{p s} a_{q s} + 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}.
inline MatrixXcd fermion_hamiltonian(const qcmps::MolecularIntegrals& ints, bool interleaved = true) {
    const std::size_t no = ints.n_orb(), n = 2 * no;
    const std::size_t dim = std::size_t{1} << n;
    std::vector<MatrixXcd> cr(n), an(n);
    for (std::size_t k = 0; k < n; ++k) {
        cr[k] = creation(k, n);
        an[k] = cr[k].adjoint();
    }
    MatrixXcd h = ints.e_core() * MatrixXcd::Identity(dim, dim);
    for (std::size_t p = 0; p < no; ++p)
        for (std::size_t q = 0; q < no; ++q)
            for (int s = 0; s < 2; ++s)
                if (ints.h1(p, q) != 0.0)
                    h += ints.h1(p, q) * cr[site_of(p, s, no, interleaved)] * an[site_of(q, s, no, interleaved)];
    for (std::size_t p = 0; p < no; ++p)
        for (std::size_t q = 0; q < no; ++q)
            for (std::size_t r = 0; r < no; ++r)
                for (std::size_t s = 0; s < no; ++s) {
                    const double v = ints.g2(p, q, r, s);
                    if (v == 0.0)
                        continue;
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b)
                            h += 0.5 * v * cr[site_of(p, a, no, interleaved)] * cr[site_of(r, b, no, interleaved)] *
                                 an[site_of(s, b, no, interleaved)] * an[site_of(q, a, no, interleaved)];
                }
    return h;
}

// Slater-Condon energy of the closed/open-shell aufbau determinant.
inline double slater_condon_hf(const qcmps::MolecularIntegrals& ints) {
    const int n_alpha = (ints.n_elec() + ints.ms2()) / 2;
    const int n_beta = (ints.n_elec() - ints.ms2()) / 2;
    std::vector<std::pair<std::size_t, int>> occ;
    for (int i = 0; i < n_alpha; ++i)
        occ.emplace_back(i, 0);
    for (int i = 0; i < n_beta; ++i)
        occ.emplace_back(i, 1);
    double e = ints.e_core();
    for (const auto& [i, s] : occ)
        e += ints.h1(i, i);
    for (const auto& [i, si] : occ)
        for (const auto& [j, sj] : occ) {
            e += 0.5 * ints.g2(i, i, j, j);
            if (si == sj)
                e -= 0.5 * ints.g2(i, j, j, i);
        }
    return e;
}

// Number and S_z eigenvalues of a basis state.
inline int popcount_index(std::size_t b) { return std::popcount(b); }

inline int twice_sz(std::size_t b, std::size_t n_orb, bool interleaved) {
    int s = 0;
    for (std::size_t p = 0; p < n_orb; ++p) {
        s += (b >> site_of(p, 0, n_orb, interleaved)) & 1;
        s -= (b >> site_of(p, 1, n_orb, interleaved)) & 1;
    }
    return s;
}

struct SectorGround {
    double energy;
    VectorXcd vector;
};

inline SectorGround sector_ground(const MatrixXcd& h, std::size_t n_orb, int n_elec, int ms2,
                                  bool interleaved = true) {
    std::vector<Eigen::Index> basis;
    for (Eigen::Index b = 0; b < h.rows(); ++b)
        if (popcount_index(b) == n_elec && twice_sz(b, n_orb, interleaved) == ms2)
            basis.push_back(b);
    MatrixXcd sub(basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            sub(i, j) = h(basis[i], basis[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sub);
    VectorXcd v = VectorXcd::Zero(h.rows());
    for (std::size_t i = 0; i < basis.size(); ++i)
        v(basis[i]) = es.eigenvectors()(i, 0);
    return {es.eigenvalues()(0), v};
}

// Direct simulation of the sequential circuit: N physical qubits plus Nq-1
// bond qubits starting in |0>. Block k acts on (physical k, bond register)
// with the physical qubit most significant in the block's own basis.
// Returns the reduced density matrix on the physical qubits (bit k = site k).
// With project = true the bond register is projected on |0...0> and the
// result normalized instead of traced out.
inline MatrixXcd circuit_density_matrix(const std::vector<MatrixXcd>& blocks, bool project = false) {
    const std::size_t n = blocks.size();
    const std::size_t dbond = blocks.front().rows() / 2;
    const std::size_t nphys = std::size_t{1} << n;
    // Register index: phys + nphys * bond.
    VectorXcd psi = VectorXcd::Zero(nphys * dbond);
    psi(0) = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        VectorXcd next = VectorXcd::Zero(psi.size());
        const MatrixXcd& u = blocks[k];
        for (std::size_t phys = 0; phys < nphys; ++phys)
            for (std::size_t bond = 0; bond < dbond; ++bond) {
                const cplx a = psi(phys + nphys * bond);
                if (a == cplx(0.0))
                    continue;
                const std::size_t bit = phys >> k & 1;
                const std::size_t col = bit * dbond + bond;
                for (std::size_t out_bit = 0; out_bit < 2; ++out_bit)
                    for (std::size_t out_bond = 0; out_bond < dbond; ++out_bond) {
                        const std::size_t row = out_bit * dbond + out_bond;
                        const std::size_t out_phys = (phys & ~(std::size_t{1} << k)) | (out_bit << k);
                        next(out_phys + nphys * out_bond) += u(row, col) * a;
                    }
            }
        psi = next;
    }
    MatrixXcd rho = MatrixXcd::Zero(nphys, nphys);
    if (project) {
        VectorXcd v = psi.head(nphys);
        v /= v.norm();
        rho = v * v.adjoint();
    } else {
        for (std::size_t bond = 0; bond < dbond; ++bond) {
            VectorXcd v = psi.segment(nphys * bond, nphys);
            rho += v * v.adjoint();
        }
    }
    return rho;
}

inline double trace_expectation(const MatrixXcd& rho, const MatrixXcd& op) {
    return (rho * op).trace().real();
}

inline MatrixXcd random_unitary(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd a(dim, dim);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            a(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<MatrixXcd> qr(a);
    return qr.householderQ() * MatrixXcd::Identity(dim, dim);
}

inline Eigen::MatrixXd random_antisymmetric(std::size_t n, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < p; ++q) {
            k(p, q) = u(rng);
            k(q, p) = -k(p, q);
        }
    return k;
}

// Four-index transform done the slow way: one eight-fold loop per element.
inline qcmps::MolecularIntegrals naive_rotate(const qcmps::MolecularIntegrals& ints, const Eigen::MatrixXd& u) {
    const std::size_t n = ints.n_orb();
    qcmps::MolecularIntegrals out(n, ints.n_elec(), ints.ms2());
    out.set_e_core(ints.e_core());
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            double v = 0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    v += u(a, p) * u(b, q) * ints.h1(a, b);
            out.set_h1(p, q, v);
        }
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s < n; ++s) {
                    double v = 0;
                    for (std::size_t a = 0; a < n; ++a)
                        for (std::size_t b = 0; b < n; ++b)
                            for (std::size_t c = 0; c < n; ++c)
                                for (std::size_t d = 0; d < n; ++d)
                                    v += u(a, p) * u(b, q) * u(c, r) * u(d, s) * ints.g2(a, b, c, d);
                    out.set_g2(p, q, r, s, v);
                }
    return out;
}

} // namespace oracle
