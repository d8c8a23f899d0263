#pragma once

#include "qcmps/fcidump.hpp"
#include "qcmps/pauli.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace qcmps {

/// Matrix-free form of a Pauli polynomial on n <= 24 sites. Terms sharing an
/// x-mask are grouped so each output amplitude gathers from one input
/// amplitude per group.
class SparseOperator {
public:
    explicit SparseOperator(const PauliPolynomial& poly);

    std::size_t n_sites() const noexcept { return n_sites_; }
    std::uint64_t dimension() const noexcept { return std::uint64_t{1} << n_sites_; }
    std::size_t n_groups() const noexcept { return groups_.size(); }

    /// y = A x.
    void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    /// y = P A x with P the projector onto the listed basis rows (ascending).
    void apply_rows(const Eigen::VectorXcd& x, Eigen::VectorXcd& y, const std::vector<std::uint64_t>& rows) const;

    Eigen::MatrixXcd dense() const;

private:
    cplx row(const Eigen::VectorXcd& x, std::uint64_t b) const;

    struct Group {
        std::uint64_t x = 0;
        std::vector<std::uint64_t> z;
        std::vector<cplx> coeff; // includes the i^{#Y} factor
    };

    std::size_t n_sites_;
    std::vector<Group> groups_;
};

struct Sector {
    int n_elec = 0;
    int ms2 = 0;
};

enum class EigenMethod { automatic, lanczos, dense };

struct FciOptions {
    EigenMethod method = EigenMethod::automatic;
    std::size_t krylov_dim = 80;
    std::size_t max_restarts = 200;
    double residual_tol = 1e-8;
    std::uint64_t seed = 0xC0FFEE;
};

struct FciResult {
    double energy = 0.0;
    Eigen::VectorXcd vector;
    /// ||A v - E v|| for the operator actually diagonalized (shifted or projected if a sector was requested).
    double residual = 0.0;
    std::size_t iterations = 0;
    EigenMethod method = EigenMethod::lanczos;
};

/// Additive weight of the (N - n_elec)^2 and (S_z - ms2/2)^2 sector shifts.
inline constexpr double kSectorShift = 1e3;

/// Lowest eigenpair of a Hermitian polynomial. With a sector, the dense path
/// adds the shift polynomials above; Lanczos instead projects every product
/// onto the sector's basis states, which is exact for operators conserving N
/// and S_z. The sector's S_z assumes the interleaved spin-orbital ordering
/// unless another one is given.
FciResult ground_state_fci(const PauliPolynomial& hamiltonian,
                           std::optional<Sector> sector = std::nullopt,
                           const FciOptions& options = {},
                           SiteOrdering ordering = SiteOrdering::interleaved);

/// Energy of the aufbau determinant of the integrals' (n_elec, ms2).
double hf_energy(const MolecularIntegrals& ints, SiteOrdering ordering = SiteOrdering::interleaved);

/// Computational basis state with the listed sites occupied (bit k = site k).
Eigen::VectorXcd basis_state(std::size_t n_sites, const std::vector<std::size_t>& occupied);

/// <v|obs|v> for a normalized v; throws NumericalError on imaginary residue > 1e-9.
double expectation_statevector(const Eigen::VectorXcd& v, const PauliPolynomial& obs);
cplx expectation_statevector_complex(const Eigen::VectorXcd& v, const PauliPolynomial& obs);

} // namespace qcmps
