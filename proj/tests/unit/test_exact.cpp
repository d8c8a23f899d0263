#include "oracles.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/exact.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/orbital.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace qcmps;
using oracle::cplx;

namespace {

PauliPolynomial random_hermitian(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> letter(0, 3);
    std::normal_distribution<double> g;
    std::vector<PauliTerm> out;
    for (std::size_t t = 0; t < terms; ++t) {
        PauliString s;
        for (std::size_t k = 0; k < n; ++k)
            s.set(k, static_cast<PauliLetter>(letter(rng)));
        out.push_back({g(rng), s});
    }
    return PauliPolynomial(n, out);
}

Eigen::VectorXcd random_state(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = cplx(g(rng), g(rng));
    return v.normalized();
}

double dense_lowest(const PauliPolynomial& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::polynomial_matrix(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace

TEST(SparseOperator, MatchesDenseMatrix) {
    std::mt19937_64 rng(1);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto p = random_hermitian(n, 30, rng);
        const SparseOperator op(p);
        const auto ref = oracle::polynomial_matrix(p);
        EXPECT_LT((op.dense() - ref).cwiseAbs().maxCoeff(), 1e-12);
        const auto v = random_state(n, rng);
        EXPECT_LT((op.apply(v) - ref * v).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(GroundState, SingleSiteMinusZ) {
    const PauliPolynomial h(1, {{-1.0, PauliString{{0, PauliLetter::Z}}}});
    for (auto method : {EigenMethod::dense, EigenMethod::lanczos}) {
        FciOptions opt;
        opt.method = method;
        const auto r = ground_state_fci(h, std::nullopt, opt);
        EXPECT_NEAR(r.energy, -1.0, 1e-12);
        EXPECT_NEAR(std::abs(r.vector(0)), 1.0, 1e-10);
    }
}

TEST(GroundState, LanczosAgreesWithDenseOnRandomPolynomials) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const auto h = random_hermitian(8, 40, rng);
        FciOptions opt;
        opt.method = EigenMethod::lanczos;
        const auto r = ground_state_fci(h, std::nullopt, opt);
        EXPECT_NEAR(r.energy, dense_lowest(h), 1e-9) << trial;
        EXPECT_LT(r.residual, 1e-8);
    }
}

TEST(GroundState, H2MatchesDenseSector) {
    const auto ints = read_fcidump(oracle::fixture("h2_0.7414.fcidump")).integrals;
    const auto h = build_qubit_hamiltonian(ints);
    const auto ref = oracle::sector_ground(oracle::polynomial_matrix(h), 2, 2, 0);
    for (auto method : {EigenMethod::dense, EigenMethod::lanczos}) {
        FciOptions opt;
        opt.method = method;
        const auto r = ground_state_fci(h, Sector{2, 0}, opt);
        EXPECT_NEAR(r.energy, ref.energy, 1e-10);
        EXPECT_NEAR(r.energy, -1.137, 1e-3);
        EXPECT_NEAR(std::abs(r.vector.dot(ref.vector)), 1.0, 1e-8);
    }
    EXPECT_GT(hf_energy(ints), ref.energy);
}

TEST(GroundState, SectorShiftIsInertWhenGroundStateAlreadyInSector) {
    for (const char* name : {"h2_0.7414.fcidump", "h4_linear_2.0.fcidump"}) {
        const auto ints = read_fcidump(oracle::fixture(name)).integrals;
        const auto h = build_qubit_hamiltonian(ints);
        const auto free = ground_state_fci(h);
        const auto sector = ground_state_fci(h, Sector{ints.n_elec(), ints.ms2()});
        EXPECT_NEAR(free.energy, sector.energy, 1e-9) << name;
    }
}

TEST(GroundState, SectorSelectsRequestedSymmetry) {
    const auto ints = read_fcidump(oracle::fixture("h4_linear_2.0.fcidump")).integrals;
    for (auto ordering : {SiteOrdering::interleaved, SiteOrdering::blocked}) {
        const bool il = ordering == SiteOrdering::interleaved;
        const auto h = build_qubit_hamiltonian(ints, ordering);
        const auto m = oracle::polynomial_matrix(h);
        for (auto [ne, ms2] : {std::pair{4, 0}, {3, 1}, {4, 2}}) {
            const auto ref = oracle::sector_ground(m, 4, ne, ms2, il);
            const auto r = ground_state_fci(h, Sector{ne, ms2}, {}, ordering);
            EXPECT_NEAR(r.energy, ref.energy, 1e-9) << ne << ' ' << ms2;
            EXPECT_NEAR(expectation_statevector(r.vector, build_number_operator(8)), ne, 1e-8);
        }
    }
}

TEST(GroundState, RefusesNonHermitian) {
    const PauliPolynomial h(2, {{cplx(0, 1), PauliString{{0, PauliLetter::X}}}});
    EXPECT_THROW(ground_state_fci(h), ContractViolation);
}

TEST(GroundState, MethodLimits) {
    FciOptions opt;
    opt.method = EigenMethod::dense;
    EXPECT_THROW(ground_state_fci(PauliPolynomial::identity(13), std::nullopt, opt), ContractViolation);
    EXPECT_THROW(ground_state_fci(PauliPolynomial::identity(21)), ContractViolation);
}

TEST(GroundState, InvariantUnderOrbitalRotation) {
    const auto ints = read_fcidump(oracle::fixture("h4_linear_2.0.fcidump")).integrals;
    const double e0 = ground_state_fci(build_qubit_hamiltonian(ints), Sector{4, 0}).energy;
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3; ++trial) {
        const auto u = exponentiate_kappa(oracle::random_antisymmetric(4, 1.0, rng));
        const auto rotated = rotate_integrals(ints, u);
        EXPECT_NEAR(ground_state_fci(build_qubit_hamiltonian(rotated), Sector{4, 0}).energy, e0, 1e-8);
    }
}

TEST(HfEnergy, ZeroIntegralsGiveCore) {
    MolecularIntegrals ints(3, 2, 0);
    ints.set_e_core(-0.25);
    EXPECT_EQ(hf_energy(ints), -0.25);
}

TEST(HfEnergy, MatchesDeterminantOnAllFixtures) {
    for (const char* name : {"h2_0.6.fcidump", "h2_2.5.fcidump", "h4_linear_2.0.fcidump", "h6_rect_2.0.fcidump",
                             "h8_cubic_2.0.fcidump"}) {
        const auto ints = read_fcidump(oracle::fixture(name)).integrals;
        const auto h = build_qubit_hamiltonian(ints);
        const auto occ = aufbau_occupied_sites(ints.n_orb(), ints.n_elec(), ints.ms2(), SiteOrdering::interleaved);
        EXPECT_NEAR(hf_energy(ints), expectation_statevector(basis_state(h.n_sites(), occ), h), 1e-10) << name;
    }
}

TEST(HfEnergy, OpenShellUsesSpinProjection) {
    auto ints = read_fcidump(oracle::fixture("h4_linear_2.0.fcidump")).integrals;
    MolecularIntegrals triplet(ints.n_orb(), ints.n_elec(), 2);
    triplet.set_e_core(ints.e_core());
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 4; ++q) {
            triplet.set_h1(p, q, ints.h1(p, q));
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t s = 0; s < 4; ++s)
                    triplet.set_g2(p, q, r, s, ints.g2(p, q, r, s));
        }
    EXPECT_NEAR(hf_energy(triplet), oracle::slater_condon_hf(triplet), 1e-10);
}

TEST(StatevectorExpectation, BasicCases) {
    EXPECT_NEAR(expectation_statevector(basis_state(4, {0, 1}), build_number_operator(4)), 2.0, 1e-15);
    std::mt19937_64 rng(4);
    const auto v = random_state(5, rng);
    EXPECT_NEAR(expectation_statevector(v, PauliPolynomial::identity(5)), 1.0, 1e-12);
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto p = random_hermitian(n, 15, rng);
        const auto w = random_state(n, rng);
        const double ref = (w.adjoint() * oracle::polynomial_matrix(p) * w)(0).real();
        EXPECT_NEAR(expectation_statevector(w, p), ref, 1e-12);
    }
}

TEST(StatevectorExpectation, Errors) {
    EXPECT_THROW(expectation_statevector(Eigen::VectorXcd::Ones(8), PauliPolynomial::identity(3)), ContractViolation);
    EXPECT_THROW(expectation_statevector(basis_state(3, {0}), PauliPolynomial::identity(4)), ContractViolation);
}
