#include "qcmps/fermion.hpp"

#include "qcmps/errors.hpp"

namespace qcmps {

PauliPolynomial jordan_wigner(const LadderOp& op, std::size_t n_sites) {
    require(op.site < n_sites, "ladder operator site " + std::to_string(op.site) +
                                   " outside " + std::to_string(n_sites) + " sites");
    PauliString x_part;
    PauliString y_part;
    for (std::size_t k = 0; k < op.site; ++k) {
        x_part.set(k, PauliLetter::Z);
        y_part.set(k, PauliLetter::Z);
    }
    x_part.set(op.site, PauliLetter::X);
    y_part.set(op.site, PauliLetter::Y);
    const cplx y_coeff = op.creation ? cplx{0.0, -0.5} : cplx{0.0, 0.5};
    return PauliPolynomial(n_sites, {{0.5, x_part}, {y_coeff, y_part}}, 0.0);
}

PauliPolynomial jordan_wigner(const FermionOperator& op, std::size_t n_sites) {
    PauliPolynomial out = PauliPolynomial::identity(n_sites, op.coeff);
    for (const auto& ladder : op.ladder)
        out = out * jordan_wigner(ladder, n_sites);
    return out;
}

PauliPolynomial jordan_wigner(std::span<const FermionOperator> ops, std::size_t n_sites) {
    std::vector<PauliTerm> terms;
    for (const auto& op : ops) {
        const auto mapped = jordan_wigner(op, n_sites);
        terms.insert(terms.end(), mapped.terms().begin(), mapped.terms().end());
    }
    return PauliPolynomial(n_sites, std::move(terms));
}

PauliPolynomial build_number_operator(std::size_t n_sites) {
    std::vector<PauliTerm> terms{{0.5 * static_cast<double>(n_sites), PauliString{}}};
    for (std::size_t p = 0; p < n_sites; ++p)
        terms.push_back({-0.5, PauliString{{p, PauliLetter::Z}}});
    return PauliPolynomial(n_sites, std::move(terms)).real_hermitian();
}

PauliPolynomial build_sz_operator(std::size_t n_orb, SiteOrdering ordering) {
    const std::size_t n_sites = 2 * n_orb;
    std::vector<FermionOperator> ops;
    for (std::size_t p = 0; p < n_orb; ++p) {
        const auto a = spin_orbital_site(p, Spin::alpha, n_orb, ordering);
        const auto b = spin_orbital_site(p, Spin::beta, n_orb, ordering);
        ops.push_back({0.5, {create(a), annihilate(a)}});
        ops.push_back({-0.5, {create(b), annihilate(b)}});
    }
    return jordan_wigner(ops, n_sites).real_hermitian();
}

PauliPolynomial build_s2_operator(std::size_t n_orb, SiteOrdering ordering) {
    const std::size_t n_sites = 2 * n_orb;
    std::vector<FermionOperator> s_plus;
    std::vector<FermionOperator> s_minus;
    for (std::size_t p = 0; p < n_orb; ++p) {
        const auto a = spin_orbital_site(p, Spin::alpha, n_orb, ordering);
        const auto b = spin_orbital_site(p, Spin::beta, n_orb, ordering);
        s_plus.push_back({1.0, {create(a), annihilate(b)}});
        s_minus.push_back({1.0, {create(b), annihilate(a)}});
    }
    const auto sp = jordan_wigner(s_plus, n_sites);
    const auto sm = jordan_wigner(s_minus, n_sites);
    const auto sz = build_sz_operator(n_orb, ordering);
    return (sm * sp + sz * (sz + PauliPolynomial::identity(n_sites))).real_hermitian();
}

} // namespace qcmps
