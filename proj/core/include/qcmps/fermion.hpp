#pragma once

#include "qcmps/fcidump.hpp"
#include "qcmps/pauli.hpp"

#include <span>
#include <vector>

namespace qcmps {

struct LadderOp {
    std::size_t site;
    bool creation;
};

inline LadderOp create(std::size_t site) { return {site, true}; }
inline LadderOp annihilate(std::size_t site) { return {site, false}; }

/// coeff * ladder[0] ladder[1] ... ladder[n-1]; the rightmost operator acts first.
struct FermionOperator {
    cplx coeff{1.0, 0.0};
    std::vector<LadderOp> ladder;
};

/// a+_p -> (X_p - iY_p)/2 Z_{p-1}...Z_0 and a_p -> (X_p + iY_p)/2 Z_{p-1}...Z_0.
PauliPolynomial jordan_wigner(const LadderOp& op, std::size_t n_sites);
PauliPolynomial jordan_wigner(const FermionOperator& op, std::size_t n_sites);
PauliPolynomial jordan_wigner(std::span<const FermionOperator> ops, std::size_t n_sites);

/// e_core + sum hso a+_P a_Q + 1/4 sum <PQ||RS> a+_P a+_Q a_S a_R, mapped and
/// canonicalized; coefficients below screen_eps are dropped and their total
/// magnitude is reported by PauliPolynomial::screened_mass().
PauliPolynomial build_qubit_hamiltonian(const MolecularIntegrals& ints,
                                        SiteOrdering ordering = SiteOrdering::interleaved,
                                        double screen_eps = PauliPolynomial::kDefaultScreen);

/// N = sum_P (I - Z_P)/2.
PauliPolynomial build_number_operator(std::size_t n_sites);

/// S_z = 1/2 sum_p (n_{p alpha} - n_{p beta}).
PauliPolynomial build_sz_operator(std::size_t n_orb, SiteOrdering ordering);

/// S^2 = S_- S_+ + S_z (S_z + 1), built from ladder operators and mapped.
PauliPolynomial build_s2_operator(std::size_t n_orb, SiteOrdering ordering);

} // namespace qcmps
