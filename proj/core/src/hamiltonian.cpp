#include "qcmps/errors.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/parallel.hpp"

namespace qcmps {

namespace {

// Expands coeff * prod(factors) where each factor is a short Pauli sum.
void append_product(cplx coeff, std::span<const PauliPolynomial* const> factors,
                    std::vector<PauliTerm>& out) {
    std::vector<PauliTerm> partial{{coeff, PauliString{}}};
    std::vector<PauliTerm> next;
    for (const auto* factor : factors) {
        next.clear();
        for (const auto& left : partial)
            for (const auto& right : factor->terms())
                next.push_back(multiply_terms(left, right));
        partial.swap(next);
    }
    out.insert(out.end(), partial.begin(), partial.end());
}

} // namespace

PauliPolynomial build_qubit_hamiltonian(const MolecularIntegrals& ints, SiteOrdering ordering,
                                        double screen_eps) {
    require(screen_eps >= 0.0, "screen_eps must be non-negative");
    const SpinOrbitalIntegrals so(ints, ordering);
    const std::size_t n = so.n_sites();

    std::vector<PauliPolynomial> up;
    std::vector<PauliPolynomial> down;
    for (std::size_t p = 0; p < n; ++p) {
        up.push_back(jordan_wigner(create(p), n));
        down.push_back(jordan_wigner(annihilate(p), n));
    }

    // One task per leading index; concatenated in index order so the merged
    // polynomial does not depend on the worker count.
    std::vector<std::vector<PauliTerm>> partial(n);
    parallel_for(n, [&](std::size_t P) {
        auto& out = partial[P];
        for (std::size_t Q = 0; Q < n; ++Q) {
            const double h = so.hso(P, Q);
            if (h != 0.0) {
                const PauliPolynomial* f[] = {&up[P], &down[Q]};
                append_product(h, f, out);
            }
        }
        for (std::size_t Q = 0; Q < n; ++Q)
            for (std::size_t R = 0; R < n; ++R)
                for (std::size_t S = 0; S < n; ++S) {
                    const double v = so.antisymmetrized(P, Q, R, S);
                    if (v == 0.0)
                        continue;
                    const PauliPolynomial* f[] = {&up[P], &up[Q], &down[S], &down[R]};
                    append_product(0.25 * v, f, out);
                }
    });

    std::vector<PauliTerm> terms{{ints.e_core(), PauliString{}}};
    for (auto& part : partial)
        terms.insert(terms.end(), part.begin(), part.end());
    return PauliPolynomial(n, std::move(terms), screen_eps).real_hermitian();
}

} // namespace qcmps
