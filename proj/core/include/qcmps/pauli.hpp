#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qcmps {

using cplx = std::complex<double>;

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliLetter letter);
PauliLetter parse_pauli_letter(char c);

/// Tensor product of single-site Paulis in symplectic form: site k carries
/// X if only x is set, Z if only z is set, Y if both are set.
class PauliString {
public:
    static constexpr std::size_t kMaxSites = 128;
    using Mask = std::array<std::uint64_t, 2>;

    PauliString() = default;
    PauliString(const Mask& x, const Mask& z) : x_(x), z_(z) {}
    PauliString(std::initializer_list<std::pair<std::size_t, PauliLetter>> factors);

    PauliLetter letter(std::size_t site) const;
    void set(std::size_t site, PauliLetter letter);

    bool is_identity() const { return (x_[0] | x_[1] | z_[0] | z_[1]) == 0; }
    std::size_t weight() const;
    /// Highest non-identity site; only meaningful when !is_identity().
    std::size_t highest_site() const;
    std::vector<std::pair<std::size_t, PauliLetter>> factors() const;

    const Mask& x_mask() const { return x_; }
    const Mask& z_mask() const { return z_; }

    /// Number of Y factors.
    std::size_t y_count() const;

    friend bool operator==(const PauliString&, const PauliString&) = default;

private:
    Mask x_{};
    Mask z_{};
};

/// Lexicographic order of the (site, letter) factor lists, letters X < Y < Z.
bool canonical_less(const PauliString& a, const PauliString& b);

/// Single-site letters in site order including identities; used for
/// prefix-sharing contractions.
bool site_major_less(const PauliString& a, const PauliString& b);

struct PauliStringHash {
    std::size_t operator()(const PauliString& s) const noexcept;
};

std::string to_string(const PauliString& s);

struct PauliTerm {
    cplx coeff{1.0, 0.0};
    PauliString string;
};

/// Operator product a*b with the phase folded into the coefficient.
PauliTerm multiply_terms(const PauliTerm& a, const PauliTerm& b);

/// Weighted sum of Pauli strings in canonical order, duplicates merged.
class PauliPolynomial {
public:
    static constexpr double kDefaultScreen = 1e-12;

    explicit PauliPolynomial(std::size_t n_sites = 0);
    PauliPolynomial(std::size_t n_sites, std::vector<PauliTerm> terms,
                    double screen_eps = kDefaultScreen);

    static PauliPolynomial identity(std::size_t n_sites, cplx coeff = 1.0);

    std::size_t n_sites() const noexcept { return n_sites_; }
    const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool empty() const noexcept { return terms_.empty(); }

    /// Sum of |coeff| removed by screening when this polynomial was formed.
    double screened_mass() const noexcept { return screened_mass_; }

    cplx coefficient(const PauliString& s) const;
    cplx identity_coefficient() const { return coefficient(PauliString{}); }

    PauliPolynomial canonicalized(double screen_eps = kDefaultScreen) const;
    PauliPolynomial adjoint() const;
    bool is_hermitian(double tol = 1e-12) const;

    /// Asserts |Im c| < tol on every coefficient, then zeroes the imaginary parts.
    PauliPolynomial real_hermitian(double tol = 1e-12) const;

    PauliPolynomial& operator+=(const PauliPolynomial& other);
    PauliPolynomial& operator-=(const PauliPolynomial& other);
    PauliPolynomial& operator*=(cplx scale);

    friend PauliPolynomial operator+(PauliPolynomial a, const PauliPolynomial& b) { return a += b; }
    friend PauliPolynomial operator-(PauliPolynomial a, const PauliPolynomial& b) { return a -= b; }
    friend PauliPolynomial operator*(PauliPolynomial a, cplx s) { return a *= s; }
    friend PauliPolynomial operator*(cplx s, PauliPolynomial a) { return a *= s; }
    friend PauliPolynomial operator*(const PauliPolynomial& a, const PauliPolynomial& b);

    friend bool operator==(const PauliPolynomial& a, const PauliPolynomial& b);

    /// Dense 2^n x 2^n matrix with bit k of the basis index = site k.
    Eigen::MatrixXcd dense_matrix() const;

private:
    std::size_t n_sites_;
    std::vector<PauliTerm> terms_;
    double screened_mass_ = 0.0;
};

PauliPolynomial commutator(const PauliPolynomial& a, const PauliPolynomial& b);

/// Dense matrix of a single string on n sites.
Eigen::MatrixXcd dense_matrix(const PauliString& s, std::size_t n_sites);

/// Text export: a "# n_sites N" line, then one line per term
/// "coeff site:letter site:letter ..." with coeff printed as "re" or "(re,im)"
/// at 17 significant digits.
void write_polynomial_text(std::ostream& out, const PauliPolynomial& poly);
PauliPolynomial read_polynomial_text(std::istream& in);

} // namespace qcmps
