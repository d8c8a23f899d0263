#pragma once

#include "qcmps/circuit_blocks.hpp"
#include "qcmps/pauli.hpp"
#include "qcmps/sites.hpp"

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace qcmps {

/// Rank-3 site tensor T^i[u][v]: physical index i, left bond u, right bond v.
struct SiteTensor {
    std::array<Eigen::MatrixXcd, 2> slice;

    Eigen::Index bond_dim() const { return slice[0].rows(); }
};

/// T^i[u][v] = <i,v| U |0,u> for a 2D x 2D block unitary whose most
/// significant qubit is physical. Rejects inputs with ||U^+U - I|| > 1e-8.
SiteTensor block_to_tensor(const Eigen::MatrixXcd& unitary);

/// Same mapping from only the physical-|0> columns of the unitary (2D x D).
SiteTensor tensor_from_columns(const Eigen::MatrixXcd& columns);

enum class CanonicalSide { left, right };

/// Max-norm deviation of sum_i T^i T^i+ (right) or sum_i T^i+ T^i (left) from I.
double check_canonical(const SiteTensor& tensor, CanonicalSide side);

/// How the final bond register is closed: traced out (reset/discard) or
/// projected onto |0...0> with the result renormalized.
enum class BoundaryMode { trace, project };

std::string to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(std::string_view text);

class QcmpsState {
public:
    explicit QcmpsState(std::vector<SiteTensor> sites);

    static QcmpsState from_parameters(const AnsatzSpec& ansatz, std::span<const double> params);

    std::size_t n_sites() const { return sites_.size(); }
    Eigen::Index bond_dim() const { return sites_.front().bond_dim(); }
    const SiteTensor& site(std::size_t k) const { return sites_[k]; }
    const std::vector<SiteTensor>& sites() const { return sites_; }

private:
    std::vector<SiteTensor> sites_;
};

/// Left environment step: E' = sum_{i,i'} <i'|s|i> T^{i'}+ E T^i.
Eigen::MatrixXcd transfer_left(const Eigen::MatrixXcd& env, const SiteTensor& t, PauliLetter s);
/// Right environment step: R' = sum_{i,i'} <i'|s|i> T^i R T^{i'}+.
Eigen::MatrixXcd transfer_right(const Eigen::MatrixXcd& env, const SiteTensor& t, PauliLetter s);

Eigen::MatrixXcd left_boundary(Eigen::Index bond_dim);
Eigen::MatrixXcd right_boundary(Eigen::Index bond_dim, BoundaryMode mode);

/// <P> for each string. Project mode divides by the norm of the projected state.
std::vector<cplx> pauli_expectations(const QcmpsState& state, std::span<const PauliString> strings,
                                     BoundaryMode mode = BoundaryMode::trace);

/// sum_t c_t <P_t> for a Hermitian polynomial; throws NumericalError when the
/// imaginary residue exceeds 1e-9.
double expectation(const QcmpsState& state, const PauliPolynomial& obs,
                   BoundaryMode mode = BoundaryMode::trace);
/// Same contraction without the Hermiticity check (for transition operators).
cplx expectation_complex(const QcmpsState& state, const PauliPolynomial& obs,
                         BoundaryMode mode = BoundaryMode::trace);

/// Amplitudes c[config][u_N], stored at index u_N * 2^N + config where bit k
/// of config is the physical index of site k.
struct QcmpsAmplitudes {
    std::size_t n_sites = 0;
    Eigen::Index bond_dim = 1;
    Eigen::VectorXcd amplitudes;

    /// The (unnormalized) physical state attached to final bond value u.
    Eigen::VectorXcd bond_slice(Eigen::Index u) const;
};

QcmpsAmplitudes to_statevector(const QcmpsState& state);

/// Product state of the aufbau determinant. Each site uses I_D on the
/// occupied (T^1) or empty (T^0) slice, so any bond dimension is accepted.
QcmpsState hartree_fock_state(std::size_t n_sites, int n_elec,
                              SiteOrdering ordering = SiteOrdering::interleaved,
                              std::optional<int> ms2 = std::nullopt,
                              Eigen::Index bond_dim = 1);

/// Debug dump: per site a "site k D d" line, then one line per (i, u) row of
/// "re im" pairs at 17 significant digits.
void dump_tensors(std::ostream& out, const QcmpsState& state);

/// Sum in fixed pairwise order.
cplx pairwise_sum(std::span<const cplx> values);

} // namespace qcmps
