#include "oracles.hpp"

#include "qcmps/fcidump.hpp"
#include "qcmps/fermion.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <set>
#include <unsupported/Eigen/MatrixFunctions>

using namespace qcmps;
using oracle::cplx;

TEST(JordanWigner, NumberOperatorOneSite) {
    const auto n0 = jordan_wigner(FermionOperator{1.0, {create(0), annihilate(0)}}, 1);
    const PauliPolynomial expect(1, {{0.5, PauliString{}}, {-0.5, PauliString{{0, PauliLetter::Z}}}});
    EXPECT_TRUE(n0 == expect);
}

TEST(JordanWigner, NumberOperatorZStringCancels) {
    const auto n1 = jordan_wigner(FermionOperator{1.0, {create(1), annihilate(1)}}, 4);
    const PauliPolynomial expect(4, {{0.5, PauliString{}}, {-0.5, PauliString{{1, PauliLetter::Z}}}});
    EXPECT_TRUE(n1 == expect);
}

TEST(JordanWigner, LadderOperatorsMatchFockOracle) {
    for (std::size_t n = 1; n <= 5; ++n)
        for (std::size_t k = 0; k < n; ++k) {
            const auto c = jordan_wigner(create(k), n).dense_matrix();
            EXPECT_LT((c - oracle::creation(k, n)).cwiseAbs().maxCoeff(), 1e-15);
            const auto a = jordan_wigner(annihilate(k), n).dense_matrix();
            EXPECT_LT((a - oracle::creation(k, n).adjoint()).cwiseAbs().maxCoeff(), 1e-15);
        }
}

TEST(JordanWigner, GivensRotationMatchesFockOracle) {
    const double theta = 0.3;
    const std::vector<FermionOperator> gen = {{theta, {create(3), annihilate(0)}}, {-theta, {create(0), annihilate(3)}}};
    const Eigen::MatrixXcd g = jordan_wigner(gen, 4).dense_matrix();
    const Eigen::MatrixXcd fock = theta * (oracle::creation(3, 4) * oracle::creation(0, 4).adjoint() -
                                           oracle::creation(0, 4) * oracle::creation(3, 4).adjoint());
    const Eigen::MatrixXcd u = g.exp();
    const Eigen::MatrixXcd u_ref = fock.exp();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
    psi(0b0011) = 1.0;
    EXPECT_LT((u * psi - u_ref * psi).norm(), 1e-13);
    // The rotation moves amplitude from site 0 to site 3 with the sign of the
    // intervening occupied site 1.
    EXPECT_NEAR(std::abs((u * psi)(0b1010)), std::sin(theta), 1e-13);
}

TEST(Hamiltonian, H2HasFifteenTerms) {
    const auto ints = read_fcidump(oracle::fixture("h2_0.7414.fcidump")).integrals;
    EXPECT_EQ(build_qubit_hamiltonian(ints).size(), 15u);
}

TEST(Hamiltonian, ZeroIntegralsGiveCoreIdentity) {
    MolecularIntegrals ints(3, 2, 0);
    ints.set_e_core(0.75);
    const auto h = build_qubit_hamiltonian(ints);
    ASSERT_EQ(h.size(), 1u);
    EXPECT_TRUE(h.terms()[0].string.is_identity());
    EXPECT_EQ(h.terms()[0].coeff, cplx(0.75));
}

TEST(Hamiltonian, MatchesSecondQuantizedOracle) {
    for (const char* name : {"h2_0.7414.fcidump", "h2_2.0.fcidump", "h4_linear_2.0.fcidump"})
        for (bool interleaved : {true, false}) {
            const auto ints = read_fcidump(oracle::fixture(name)).integrals;
            const auto h = build_qubit_hamiltonian(ints, interleaved ? SiteOrdering::interleaved : SiteOrdering::blocked);
            const auto ref = oracle::fermion_hamiltonian(ints, interleaved);
            EXPECT_LT((oracle::polynomial_matrix(h) - ref).cwiseAbs().maxCoeff(), 1e-12) << name;
        }
}

TEST(Hamiltonian, HermitianAndSymmetric) {
    const auto ints = read_fcidump(oracle::fixture("h4_linear_2.0.fcidump")).integrals;
    for (auto ordering : {SiteOrdering::interleaved, SiteOrdering::blocked}) {
        const auto h = build_qubit_hamiltonian(ints, ordering);
        EXPECT_TRUE(h.adjoint() == h);
        for (const auto& t : h.terms())
            EXPECT_EQ(t.coeff.imag(), 0.0);
        EXPECT_TRUE(commutator(h, build_number_operator(8)).empty());
        EXPECT_TRUE(commutator(h, build_sz_operator(4, ordering)).empty());
        EXPECT_TRUE(commutator(h, build_s2_operator(4, ordering)).empty());
    }
}

TEST(SymmetryOperators, NumberAndSpinOfDeterminant) {
    const auto n = build_number_operator(4);
    const auto s2 = build_s2_operator(2, SiteOrdering::interleaved);
    Eigen::VectorXcd det = Eigen::VectorXcd::Zero(16);
    det(0b0011) = 1.0;
    EXPECT_NEAR((det.adjoint() * n.dense_matrix() * det)(0).real(), 2.0, 1e-14);
    EXPECT_NEAR((det.adjoint() * s2.dense_matrix() * det)(0).real(), 0.0, 1e-14);
}

TEST(SymmetryOperators, SpinSquaredSpectrum) {
    for (auto ordering : {SiteOrdering::interleaved, SiteOrdering::blocked}) {
        const auto s2 = build_s2_operator(2, ordering);
        for (const auto& t : s2.terms())
            EXPECT_EQ(t.coeff.imag(), 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s2.dense_matrix());
        std::set<long> values;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double v = es.eigenvalues()(i);
            values.insert(std::lround(v * 4));
            EXPECT_NEAR(v * 4, std::round(v * 4), 1e-12);
        }
        EXPECT_EQ(values, (std::set<long>{0, 3, 8}));
    }
}

TEST(SymmetryOperators, SpinSquaredMatchesFockOracle) {
    const std::size_t n_orb = 3, n = 6;
    for (bool interleaved : {true, false}) {
        Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(64, 64), sz = sp;
        for (std::size_t p = 0; p < n_orb; ++p) {
            const auto a = oracle::site_of(p, 0, n_orb, interleaved), b = oracle::site_of(p, 1, n_orb, interleaved);
            sp += oracle::creation(a, n) * oracle::creation(b, n).adjoint();
            sz += 0.5 * (oracle::creation(a, n) * oracle::creation(a, n).adjoint() -
                         oracle::creation(b, n) * oracle::creation(b, n).adjoint());
        }
        const Eigen::MatrixXcd ref = sp.adjoint() * sp + sz * (sz + Eigen::MatrixXcd::Identity(64, 64));
        const auto s2 = build_s2_operator(n_orb, interleaved ? SiteOrdering::interleaved : SiteOrdering::blocked);
        EXPECT_LT((oracle::polynomial_matrix(s2) - ref).cwiseAbs().maxCoeff(), 1e-13);
    }
}
