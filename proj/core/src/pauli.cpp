#include "qcmps/pauli.hpp"

#include "qcmps/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace qcmps {

char to_char(PauliLetter letter) {
    constexpr char chars[] = {'I', 'X', 'Y', 'Z'};
    return chars[static_cast<int>(letter)];
}

PauliLetter parse_pauli_letter(char c) {
    switch (c) {
    case 'I': return PauliLetter::I;
    case 'X': return PauliLetter::X;
    case 'Y': return PauliLetter::Y;
    case 'Z': return PauliLetter::Z;
    default: throw ContractViolation(std::string("unknown Pauli letter '") + c + "'");
    }
}

namespace {

int popcount(const PauliString::Mask& m) { return std::popcount(m[0]) + std::popcount(m[1]); }

PauliString::Mask operator&(const PauliString::Mask& a, const PauliString::Mask& b) {
    return {a[0] & b[0], a[1] & b[1]};
}
PauliString::Mask operator|(const PauliString::Mask& a, const PauliString::Mask& b) {
    return {a[0] | b[0], a[1] | b[1]};
}
PauliString::Mask operator^(const PauliString::Mask& a, const PauliString::Mask& b) {
    return {a[0] ^ b[0], a[1] ^ b[1]};
}

// Lowest set bit, or kMaxSites when empty.
std::size_t lowest_bit(const PauliString::Mask& m) {
    if (m[0])
        return static_cast<std::size_t>(std::countr_zero(m[0]));
    if (m[1])
        return 64 + static_cast<std::size_t>(std::countr_zero(m[1]));
    return PauliString::kMaxSites;
}

bool any_above(const PauliString::Mask& m, std::size_t site) {
    const std::size_t w = site / 64;
    const std::size_t b = site % 64;
    const std::uint64_t above = b == 63 ? 0 : (~std::uint64_t{0} << (b + 1));
    if (m[w] & above)
        return true;
    return w == 0 && m[1] != 0;
}

const cplx kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

} // namespace

PauliString::PauliString(std::initializer_list<std::pair<std::size_t, PauliLetter>> factors) {
    for (const auto& [site, letter] : factors)
        set(site, letter);
}

PauliLetter PauliString::letter(std::size_t site) const {
    const std::size_t w = site / 64;
    const std::uint64_t bit = std::uint64_t{1} << (site % 64);
    const bool x = x_[w] & bit;
    const bool z = z_[w] & bit;
    if (x && z)
        return PauliLetter::Y;
    if (x)
        return PauliLetter::X;
    return z ? PauliLetter::Z : PauliLetter::I;
}

void PauliString::set(std::size_t site, PauliLetter letter) {
    require(site < kMaxSites, "Pauli site index exceeds " + std::to_string(kMaxSites));
    const std::size_t w = site / 64;
    const std::uint64_t bit = std::uint64_t{1} << (site % 64);
    x_[w] &= ~bit;
    z_[w] &= ~bit;
    if (letter == PauliLetter::X || letter == PauliLetter::Y)
        x_[w] |= bit;
    if (letter == PauliLetter::Z || letter == PauliLetter::Y)
        z_[w] |= bit;
}

std::size_t PauliString::weight() const { return static_cast<std::size_t>(popcount(x_ | z_)); }

std::size_t PauliString::y_count() const { return static_cast<std::size_t>(popcount(x_ & z_)); }

std::size_t PauliString::highest_site() const {
    const auto m = x_ | z_;
    if (m[1])
        return 127 - static_cast<std::size_t>(std::countl_zero(m[1]));
    return m[0] ? 63 - static_cast<std::size_t>(std::countl_zero(m[0])) : 0;
}

std::vector<std::pair<std::size_t, PauliLetter>> PauliString::factors() const {
    std::vector<std::pair<std::size_t, PauliLetter>> out;
    auto m = x_ | z_;
    for (std::size_t w = 0; w < 2; ++w)
        for (std::uint64_t bits = m[w]; bits; bits &= bits - 1) {
            const std::size_t site = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
            out.emplace_back(site, letter(site));
        }
    return out;
}

bool canonical_less(const PauliString& a, const PauliString& b) {
    const auto diff = (a.x_mask() ^ b.x_mask()) | (a.z_mask() ^ b.z_mask());
    const std::size_t s = lowest_bit(diff);
    if (s == PauliString::kMaxSites)
        return false;
    const auto la = a.letter(s);
    const auto lb = b.letter(s);
    if (la != PauliLetter::I && lb != PauliLetter::I)
        return la < lb;
    if (la == PauliLetter::I)
        return !any_above(a.x_mask() | a.z_mask(), s);
    return any_above(b.x_mask() | b.z_mask(), s);
}

bool site_major_less(const PauliString& a, const PauliString& b) {
    const auto diff = (a.x_mask() ^ b.x_mask()) | (a.z_mask() ^ b.z_mask());
    const std::size_t s = lowest_bit(diff);
    if (s == PauliString::kMaxSites)
        return false;
    return a.letter(s) < b.letter(s);
}

std::size_t PauliStringHash::operator()(const PauliString& s) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::uint64_t w : {s.x_mask()[0], s.x_mask()[1], s.z_mask()[0], s.z_mask()[1]}) {
        h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::string to_string(const PauliString& s) {
    if (s.is_identity())
        return "I";
    std::string out;
    for (const auto& [site, letter] : s.factors()) {
        if (!out.empty())
            out += ' ';
        out += to_char(letter) + std::to_string(site);
    }
    return out;
}

PauliTerm multiply_terms(const PauliTerm& a, const PauliTerm& b) {
    const auto& x1 = a.string.x_mask();
    const auto& z1 = a.string.z_mask();
    const auto& x2 = b.string.x_mask();
    const auto& z2 = b.string.z_mask();
    const auto x3 = x1 ^ x2;
    const auto z3 = z1 ^ z2;
    // Y = i X Z per site; X^a Z^b X^c Z^d = (-1)^{bc} X^{a+c} Z^{b+d}.
    const int exponent =
        popcount(x1 & z1) + popcount(x2 & z2) + 2 * popcount(z1 & x2) - popcount(x3 & z3);
    return {a.coeff * b.coeff * kPhase[((exponent % 4) + 4) % 4], PauliString(x3, z3)};
}

PauliPolynomial::PauliPolynomial(std::size_t n_sites) : n_sites_(n_sites) {
    require(n_sites <= PauliString::kMaxSites, "polynomial exceeds the supported site count");
}

PauliPolynomial::PauliPolynomial(std::size_t n_sites, std::vector<PauliTerm> terms,
                                 double screen_eps)
    : PauliPolynomial(n_sites) {
    for (const auto& t : terms)
        require(t.string.is_identity() || t.string.highest_site() < n_sites,
                "Pauli term acts outside the polynomial's " + std::to_string(n_sites) + " sites");
    std::stable_sort(terms.begin(), terms.end(), [](const PauliTerm& a, const PauliTerm& b) {
        return canonical_less(a.string, b.string);
    });
    terms_.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size();) {
        PauliTerm merged = terms[i];
        std::size_t j = i + 1;
        for (; j < terms.size() && terms[j].string == merged.string; ++j)
            merged.coeff += terms[j].coeff;
        if (std::abs(merged.coeff) < screen_eps || merged.coeff == cplx{})
            screened_mass_ += std::abs(merged.coeff);
        else
            terms_.push_back(merged);
        i = j;
    }
}

PauliPolynomial PauliPolynomial::identity(std::size_t n_sites, cplx coeff) {
    return PauliPolynomial(n_sites, {PauliTerm{coeff, PauliString{}}});
}

cplx PauliPolynomial::coefficient(const PauliString& s) const {
    const auto it = std::lower_bound(
        terms_.begin(), terms_.end(), s,
        [](const PauliTerm& t, const PauliString& key) { return canonical_less(t.string, key); });
    return it != terms_.end() && it->string == s ? it->coeff : cplx{};
}

PauliPolynomial PauliPolynomial::canonicalized(double screen_eps) const {
    PauliPolynomial out(n_sites_, terms_, screen_eps);
    out.screened_mass_ += screened_mass_;
    return out;
}

PauliPolynomial PauliPolynomial::adjoint() const {
    PauliPolynomial out = *this;
    for (auto& t : out.terms_)
        t.coeff = std::conj(t.coeff);
    return out;
}

bool PauliPolynomial::is_hermitian(double tol) const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [tol](const PauliTerm& t) { return std::abs(t.coeff.imag()) < tol; });
}

PauliPolynomial PauliPolynomial::real_hermitian(double tol) const {
    PauliPolynomial out = *this;
    for (auto& t : out.terms_) {
        if (std::abs(t.coeff.imag()) >= tol)
            throw NumericalError("polynomial term " + to_string(t.string) +
                                 " has imaginary coefficient " +
                                 std::to_string(t.coeff.imag()) + "; expected Hermitian");
        t.coeff = t.coeff.real();
    }
    return out;
}

PauliPolynomial& PauliPolynomial::operator+=(const PauliPolynomial& other) {
    require(n_sites_ == other.n_sites_, "adding polynomials over different site counts");
    auto terms = terms_;
    terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
    const double mass = screened_mass_ + other.screened_mass_;
    *this = PauliPolynomial(n_sites_, std::move(terms));
    screened_mass_ += mass;
    return *this;
}

PauliPolynomial& PauliPolynomial::operator-=(const PauliPolynomial& other) {
    return *this += other * cplx{-1.0, 0.0};
}

PauliPolynomial& PauliPolynomial::operator*=(cplx scale) {
    std::vector<PauliTerm> terms = terms_;
    for (auto& t : terms)
        t.coeff *= scale;
    const double mass = screened_mass_;
    *this = PauliPolynomial(n_sites_, std::move(terms));
    screened_mass_ += mass;
    return *this;
}

PauliPolynomial operator*(const PauliPolynomial& a, const PauliPolynomial& b) {
    require(a.n_sites_ == b.n_sites_, "multiplying polynomials over different site counts");
    std::vector<PauliTerm> products;
    products.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_)
            products.push_back(multiply_terms(ta, tb));
    return PauliPolynomial(a.n_sites_, std::move(products));
}

bool operator==(const PauliPolynomial& a, const PauliPolynomial& b) {
    if (a.n_sites_ != b.n_sites_ || a.terms_.size() != b.terms_.size())
        return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i)
        if (a.terms_[i].string != b.terms_[i].string || a.terms_[i].coeff != b.terms_[i].coeff)
            return false;
    return true;
}

PauliPolynomial commutator(const PauliPolynomial& a, const PauliPolynomial& b) {
    return a * b - b * a;
}

Eigen::MatrixXcd dense_matrix(const PauliString& s, std::size_t n_sites) {
    require(n_sites <= 14, "dense matrices are limited to 14 sites");
    const std::size_t dim = std::size_t{1} << n_sites;
    const std::uint64_t x = s.x_mask()[0];
    const std::uint64_t z = s.z_mask()[0];
    const cplx y_phase = kPhase[s.y_count() % 4];
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        const double sign = std::popcount(b & z) % 2 ? -1.0 : 1.0;
        m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) = y_phase * sign;
    }
    return m;
}

Eigen::MatrixXcd PauliPolynomial::dense_matrix() const {
    const std::size_t dim = std::size_t{1} << n_sites_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    for (const auto& t : terms_)
        m += t.coeff * qcmps::dense_matrix(t.string, n_sites_);
    return m;
}

void write_polynomial_text(std::ostream& out, const PauliPolynomial& poly) {
    std::ostringstream buf;
    buf << std::setprecision(17);
    buf << "# n_sites " << poly.n_sites() << '\n';
    for (const auto& t : poly.terms()) {
        if (t.coeff.imag() == 0.0)
            buf << t.coeff.real();
        else
            buf << '(' << t.coeff.real() << ',' << t.coeff.imag() << ')';
        for (const auto& [site, letter] : t.string.factors())
            buf << ' ' << site << ':' << to_char(letter);
        buf << '\n';
    }
    out << buf.str();
}

PauliPolynomial read_polynomial_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_sites = 0;
    bool have_sites = false;
    std::vector<PauliTerm> terms;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token))
            continue;
        if (token[0] == '#') {
            std::string key;
            if (fields >> key && key == "n_sites" && fields >> n_sites)
                have_sites = true;
            continue;
        }
        PauliTerm term;
        try {
            if (token.front() == '(') {
                const auto comma = token.find(',');
                if (comma == std::string::npos || token.back() != ')')
                    throw ParseError("malformed complex coefficient '" + token + "'", line_no);
                term.coeff = {std::stod(token.substr(1, comma - 1)),
                              std::stod(token.substr(comma + 1, token.size() - comma - 2))};
            } else {
                std::size_t used = 0;
                term.coeff = std::stod(token, &used);
                if (used != token.size())
                    throw ParseError("malformed coefficient '" + token + "'", line_no);
            }
        } catch (const std::logic_error&) {
            throw ParseError("malformed coefficient '" + token + "'", line_no);
        }
        while (fields >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos || colon + 2 != token.size())
                throw ParseError("malformed factor '" + token + "'", line_no);
            try {
                term.string.set(std::stoul(token.substr(0, colon)),
                                parse_pauli_letter(token[colon + 1]));
            } catch (const std::logic_error&) {
                throw ParseError("malformed factor '" + token + "'", line_no);
            }
        }
        terms.push_back(term);
    }
    if (!have_sites)
        throw ParseError("missing '# n_sites N' header", line_no);
    return PauliPolynomial(n_sites, std::move(terms), 0.0);
}

} // namespace qcmps
