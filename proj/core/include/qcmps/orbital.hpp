#pragma once

#include "qcmps/fcidump.hpp"
#include "qcmps/pauli.hpp"
#include "qcmps/qcmps_state.hpp"
#include "qcmps/sites.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace qcmps {

/// U = exp(-kappa) for a real antisymmetric kappa.
Eigen::MatrixXd exponentiate_kappa(const Eigen::MatrixXd& kappa);

struct OrbitalRotation {
    Eigen::MatrixXd kappa;
    Eigen::MatrixXd u;

    static OrbitalRotation from_kappa(const Eigen::MatrixXd& kappa);
    /// Rotation given directly by its matrix; kappa is left empty.
    static OrbitalRotation from_matrix(const Eigen::MatrixXd& u);
};

/// New orbital p is sum_a u(a, p) phi_a: h' = u^T h u and the two-electron
/// tensor is transformed one index at a time.
MolecularIntegrals rotate_integrals(const MolecularIntegrals& ints, const Eigen::MatrixXd& u);

/// Whitespace-separated rows, '#' comments and blank lines skipped.
Eigen::MatrixXd parse_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);

/// Anything that can evaluate <P> for a batch of Pauli strings.
class StateSource {
public:
    virtual ~StateSource() = default;

    virtual std::size_t n_sites() const = 0;
    virtual std::vector<cplx> expectations(std::span<const PauliString> strings) const = 0;
    virtual std::string describe() const = 0;
};

class QcmpsSource final : public StateSource {
public:
    QcmpsSource(QcmpsState state, BoundaryMode mode, std::string label = "qcmps");

    std::size_t n_sites() const override { return state_.n_sites(); }
    std::vector<cplx> expectations(std::span<const PauliString> strings) const override;
    std::string describe() const override { return label_; }

private:
    QcmpsState state_;
    BoundaryMode mode_;
    std::string label_;
};

class StatevectorSource final : public StateSource {
public:
    StatevectorSource(Eigen::VectorXcd vector, std::string label = "statevector");

    std::size_t n_sites() const override { return n_sites_; }
    std::vector<cplx> expectations(std::span<const PauliString> strings) const override;
    std::string describe() const override { return label_; }

private:
    Eigen::VectorXcd v_;
    std::size_t n_sites_;
    std::string label_;
};

/// Local orbital basis order: |->, |up>, |dn>, |up dn>.
struct OrbitalRdm {
    Eigen::MatrixXcd rho;
    /// Largest |element| coupling configurations of different N or S_z.
    double selection_rule_residual = 0.0;
};

OrbitalRdm one_orbital_rdm(const StateSource& source, std::size_t p,
                           SiteOrdering ordering = SiteOrdering::interleaved);
/// Basis index 4 * a_p + a_q with each local index in the order above.
OrbitalRdm two_orbital_rdm(const StateSource& source, std::size_t p, std::size_t q,
                           SiteOrdering ordering = SiteOrdering::interleaved);

/// -sum w ln w over the eigenvalues of a density matrix (nats). Eigenvalues
/// down to -1e-10 are clamped to zero; anything more negative throws.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

struct EntanglementReport {
    Eigen::VectorXd s1;
    Eigen::MatrixXd s2;
    Eigen::MatrixXd i_pq;
    double max_selection_rule_residual = 0.0;
    std::string source;
};

/// One- and two-orbital entropies and I_pq = (s1_p + s1_q - s2_pq) / 2 for p != q.
EntanglementReport interaction_matrix(const StateSource& source,
                                      SiteOrdering ordering = SiteOrdering::interleaved);

} // namespace qcmps
