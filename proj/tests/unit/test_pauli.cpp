#include "oracles.hpp"

#include "qcmps/pauli.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace qcmps;
using oracle::cplx;

namespace {

PauliString random_string(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> letter(0, 3);
    PauliString s;
    for (std::size_t k = 0; k < n; ++k)
        s.set(k, static_cast<PauliLetter>(letter(rng)));
    return s;
}

PauliPolynomial random_polynomial(std::size_t n, std::size_t terms, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<PauliTerm> out;
    for (std::size_t t = 0; t < terms; ++t)
        out.push_back({cplx(g(rng), g(rng)), random_string(n, rng)});
    return PauliPolynomial(n, out);
}

} // namespace

TEST(PauliString, LetterStorage) {
    PauliString s{{0, PauliLetter::X}, {70, PauliLetter::Y}, {127, PauliLetter::Z}};
    EXPECT_EQ(s.letter(0), PauliLetter::X);
    EXPECT_EQ(s.letter(70), PauliLetter::Y);
    EXPECT_EQ(s.letter(127), PauliLetter::Z);
    EXPECT_EQ(s.letter(5), PauliLetter::I);
    EXPECT_EQ(s.weight(), 3u);
    EXPECT_EQ(s.y_count(), 1u);
    EXPECT_EQ(s.highest_site(), 127u);
    s.set(70, PauliLetter::I);
    EXPECT_EQ(s.weight(), 2u);
}

TEST(MultiplyTerms, XTimesYIsIZ) {
    const auto r = multiply_terms({1.0, PauliString{{0, PauliLetter::X}}}, {1.0, PauliString{{0, PauliLetter::Y}}});
    EXPECT_EQ(r.coeff, cplx(0, 1));
    EXPECT_EQ(r.string, (PauliString{{0, PauliLetter::Z}}));
}

TEST(MultiplyTerms, ZSquaredIsIdentity) {
    const auto r = multiply_terms({1.0, PauliString{{0, PauliLetter::Z}}}, {1.0, PauliString{{0, PauliLetter::Z}}});
    EXPECT_EQ(r.coeff, cplx(1, 0));
    EXPECT_TRUE(r.string.is_identity());
}

TEST(MultiplyTerms, MatchesDenseProducts) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const PauliTerm a{cplx(0.3, -1.1), random_string(n, rng)};
        const PauliTerm b{cplx(-0.7, 0.2), random_string(n, rng)};
        const auto r = multiply_terms(a, b);
        const Eigen::MatrixXcd lhs = r.coeff * oracle::string_matrix(oracle::letters_of(r.string, n));
        const Eigen::MatrixXcd rhs = (a.coeff * oracle::string_matrix(oracle::letters_of(a.string, n))) *
                         (b.coeff * oracle::string_matrix(oracle::letters_of(b.string, n)));
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-14);
    }
    const auto r = multiply_terms({1.0, PauliString{{0, PauliLetter::X}, {1, PauliLetter::Y}}},
                                  {1.0, PauliString{{0, PauliLetter::Y}, {1, PauliLetter::Y}}});
    const Eigen::MatrixXcd expect = oracle::string_matrix("XY") * oracle::string_matrix("YY");
    EXPECT_LT((r.coeff * oracle::string_matrix(oracle::letters_of(r.string, 2)) - expect).norm(), 1e-14);
}

TEST(PauliPolynomial, CanonicalOrderAndMerging) {
    const PauliString z0{{0, PauliLetter::Z}}, x1{{1, PauliLetter::X}};
    const PauliPolynomial p(2, {{1.0, x1}, {2.0, z0}, {0.5, x1}, {-2.0, z0}});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.terms()[0].string, x1);
    EXPECT_EQ(p.terms()[0].coeff, cplx(1.5));
    EXPECT_DOUBLE_EQ(p.screened_mass(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i)
        EXPECT_TRUE(canonical_less(p.terms()[i - 1].string, p.terms()[i].string));
}

TEST(PauliPolynomial, ScreeningIsReported) {
    const PauliPolynomial p(1, {{1e-13, PauliString{{0, PauliLetter::X}}}, {1.0, PauliString{}}});
    EXPECT_EQ(p.size(), 1u);
    EXPECT_NEAR(p.screened_mass(), 1e-13, 1e-20);
}

TEST(PauliPolynomial, CanonicalizationIsIdempotent) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_polynomial(5, 40, rng);
        EXPECT_TRUE(p.canonicalized() == p);
        EXPECT_TRUE(p.canonicalized().canonicalized() == p.canonicalized());
    }
}

TEST(PauliPolynomial, DenseMatrixMatchesKroneckerSum) {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto p = random_polynomial(n, 25, rng);
        EXPECT_LT((p.dense_matrix() - oracle::polynomial_matrix(p)).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(PauliPolynomial, ProductAndCommutatorMatchDense) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_polynomial(4, 10, rng);
        const auto b = random_polynomial(4, 10, rng);
        const auto ma = oracle::polynomial_matrix(a), mb = oracle::polynomial_matrix(b);
        EXPECT_LT((oracle::polynomial_matrix(a * b) - ma * mb).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((oracle::polynomial_matrix(commutator(a, b)) - (ma * mb - mb * ma)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((oracle::polynomial_matrix(a.adjoint()) - ma.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(PauliPolynomial, HermitianHelpers) {
    const PauliPolynomial h(2, {{cplx(0.5, 0.0), PauliString{{0, PauliLetter::X}}},
                                {cplx(0.25, 0.0), PauliString{{1, PauliLetter::Y}}}});
    EXPECT_TRUE(h.is_hermitian());
    const PauliPolynomial a(1, {{cplx(0.0, 1.0), PauliString{{0, PauliLetter::Z}}}});
    EXPECT_FALSE(a.is_hermitian());
    EXPECT_ANY_THROW(a.real_hermitian());
}

TEST(PauliPolynomial, TextRoundTrip) {
    std::mt19937_64 rng(21);
    const auto p = random_polynomial(7, 30, rng);
    std::stringstream buf;
    write_polynomial_text(buf, p);
    const auto q = read_polynomial_text(buf);
    EXPECT_EQ(q.n_sites(), p.n_sites());
    EXPECT_TRUE(q == p);
}
