#include "qcmps/exact.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

namespace qcmps {

namespace {

constexpr std::size_t kMaxSparseSites = 24;
constexpr std::size_t kMaxLanczosSites = 20;
constexpr std::size_t kMaxDenseSites = 12;
constexpr std::size_t kAutoDenseSites = 6;
constexpr std::uint64_t kRowChunk = 4096;

cplx i_power(std::size_t k) {
    switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

PauliPolynomial sector_shift(std::size_t n_sites, const Sector& sector, SiteOrdering ordering) {
    require(n_sites % 2 == 0, "sector shifts need an even number of spin-orbital sites");
    const auto n_hat = build_number_operator(n_sites) -
                       PauliPolynomial::identity(n_sites, static_cast<double>(sector.n_elec));
    const auto sz_hat = build_sz_operator(n_sites / 2, ordering) -
                        PauliPolynomial::identity(n_sites, 0.5 * sector.ms2);
    return ((n_hat * n_hat + sz_hat * sz_hat) * cplx{kSectorShift}).real_hermitian();
}

bool in_sector(std::uint64_t b, std::size_t n_sites, const Sector& sector, SiteOrdering ordering) {
    if (std::popcount(b) != sector.n_elec)
        return false;
    int ms2 = 0;
    for (std::size_t k = 0; k < n_sites; ++k)
        if ((b >> k) & 1U)
            ms2 += spin_of_site(k, n_sites / 2, ordering) == Spin::alpha ? 1 : -1;
    return ms2 == sector.ms2;
}

Eigen::VectorXcd start_vector(std::size_t n_sites, std::uint64_t seed,
                              const std::optional<Sector>& sector, SiteOrdering ordering) {
    const std::uint64_t dim = std::uint64_t{1} << n_sites;
    std::mt19937_64 gen(seed);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (std::uint64_t b = 0; b < dim; ++b) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const bool keep = !sector || in_sector(b, n_sites, *sector, ordering);
        v[static_cast<Eigen::Index>(b)] = keep ? u - 0.5 : 0.0;
    }
    const double norm = v.norm();
    if (norm == 0.0)
        throw ContractViolation("requested sector contains no basis states");
    return v / norm;
}

FciResult dense_ground_state(const SparseOperator& op) {
    require(op.n_sites() <= kMaxDenseSites, "dense diagonalization limited to 12 sites");
    const Eigen::MatrixXcd a = op.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense eigensolver failed");
    FciResult result;
    result.energy = solver.eigenvalues()[0];
    result.vector = solver.eigenvectors().col(0);
    result.residual = (a * result.vector - result.energy * result.vector).norm();
    result.method = EigenMethod::dense;
    return result;
}

// With `rows` set, every product is projected onto those basis states; the
// Krylov space then never leaves a symmetry sector the operator conserves.
FciResult lanczos(const SparseOperator& op, Eigen::VectorXcd v, const FciOptions& opt,
                  const std::vector<std::uint64_t>& rows) {
    const auto dim = static_cast<Eigen::Index>(op.dimension());
    const auto m = static_cast<Eigen::Index>(std::min<std::uint64_t>(opt.krylov_dim, op.dimension()));
    require(m >= 1, "Krylov dimension must be positive");

    FciResult result;
    result.method = EigenMethod::lanczos;
    Eigen::MatrixXcd basis(dim, m);
    Eigen::VectorXcd w(dim);
    auto apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        if (rows.empty())
            op.apply(x, y);
        else
            op.apply_rows(x, y, rows);
    };
    for (std::size_t restart = 0; restart <= opt.max_restarts; ++restart) {
        std::vector<double> alpha;
        std::vector<double> beta;
        basis.col(0) = v;
        Eigen::Index k = 0;
        for (; k < m; ++k) {
            apply(basis.col(k), w);
            ++result.iterations;
            const double a = basis.col(k).dot(w).real();
            alpha.push_back(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXcd overlaps = basis.leftCols(k + 1).adjoint() * w;
                w.noalias() -= basis.leftCols(k + 1) * overlaps;
            }
            const double b = w.norm();
            if (k + 1 == m || b < 1e-12 * std::max(1.0, std::abs(a))) {
                ++k;
                break;
            }
            beta.push_back(b);
            basis.col(k + 1) = w / b;
        }

        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            tri(j, j) = alpha[static_cast<std::size_t>(j)];
            if (j + 1 < k)
                tri(j, j + 1) = tri(j + 1, j) = beta[static_cast<std::size_t>(j)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
        const Eigen::VectorXcd y = small.eigenvectors().col(0).cast<cplx>();
        v = basis.leftCols(k) * y;
        v /= v.norm();

        apply(v, w);
        ++result.iterations;
        const double theta = v.dot(w).real();
        const double residual = (w - theta * v).norm();
        result.energy = theta;
        result.residual = residual;
        if (residual < opt.residual_tol) {
            result.vector = std::move(v);
            return result;
        }
    }
    throw NumericalError("Lanczos did not converge: residual " + std::to_string(result.residual) +
                         " after " + std::to_string(result.iterations) + " matrix-vector products");
}

} // namespace

SparseOperator::SparseOperator(const PauliPolynomial& poly) : n_sites_(poly.n_sites()) {
    require(n_sites_ <= kMaxSparseSites, "sparse operators limited to 24 sites");
    std::map<std::uint64_t, Group> by_x;
    for (const auto& t : poly.terms()) {
        const std::uint64_t x = t.string.x_mask()[0];
        auto& g = by_x[x];
        g.x = x;
        g.z.push_back(t.string.z_mask()[0]);
        g.coeff.push_back(t.coeff * i_power(t.string.y_count()));
    }
    groups_.reserve(by_x.size());
    for (auto& [x, g] : by_x)
        groups_.push_back(std::move(g));
}

cplx SparseOperator::row(const Eigen::VectorXcd& x, std::uint64_t b) const {
    cplx acc{};
    for (const auto& g : groups_) {
        // P|b'> = i^{#Y} (-1)^{|b' & z|} |b' ^ x>, so row b gathers from b' = b ^ x.
        const std::uint64_t src = b ^ g.x;
        cplx phase{};
        for (std::size_t t = 0; t < g.z.size(); ++t)
            phase += (std::popcount(src & g.z[t]) & 1) ? -g.coeff[t] : g.coeff[t];
        acc += phase * x[static_cast<Eigen::Index>(src)];
    }
    return acc;
}

void SparseOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    const std::uint64_t dim = dimension();
    require(static_cast<std::uint64_t>(x.size()) == dim,
            "vector length " + std::to_string(x.size()) + " does not match operator dimension " +
                std::to_string(dim));
    y.resize(x.size());
    const std::uint64_t n_chunks = (dim + kRowChunk - 1) / kRowChunk;
    parallel_for(n_chunks, [&](std::size_t chunk) {
        const std::uint64_t begin = chunk * kRowChunk;
        const std::uint64_t end = std::min(dim, begin + kRowChunk);
        for (std::uint64_t b = begin; b < end; ++b)
            y[static_cast<Eigen::Index>(b)] = row(x, b);
    });
}

void SparseOperator::apply_rows(const Eigen::VectorXcd& x, Eigen::VectorXcd& y,
                                const std::vector<std::uint64_t>& rows) const {
    const std::uint64_t dim = dimension();
    require(static_cast<std::uint64_t>(x.size()) == dim, "vector length does not match operator dimension");
    require(rows.empty() || rows.back() < dim, "row index out of range");
    y = Eigen::VectorXcd::Zero(x.size());
    const std::uint64_t n_chunks = (rows.size() + kRowChunk - 1) / kRowChunk;
    parallel_for(n_chunks, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kRowChunk;
        const std::size_t end = std::min<std::size_t>(rows.size(), begin + kRowChunk);
        for (std::size_t r = begin; r < end; ++r)
            y[static_cast<Eigen::Index>(rows[r])] = row(x, rows[r]);
    });
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd y;
    apply(x, y);
    return y;
}

Eigen::MatrixXcd SparseOperator::dense() const {
    require(n_sites_ <= 14, "dense matrices limited to 14 sites");
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& g : groups_)
        for (Eigen::Index col = 0; col < dim; ++col) {
            const auto src = static_cast<std::uint64_t>(col);
            cplx phase{};
            for (std::size_t t = 0; t < g.z.size(); ++t)
                phase += (std::popcount(src & g.z[t]) & 1) ? -g.coeff[t] : g.coeff[t];
            a(static_cast<Eigen::Index>(src ^ g.x), col) += phase;
        }
    return a;
}

FciResult ground_state_fci(const PauliPolynomial& hamiltonian, std::optional<Sector> sector,
                           const FciOptions& options, SiteOrdering ordering) {
    const std::size_t n = hamiltonian.n_sites();
    require(n >= 1, "Hamiltonian has no sites");
    if (!hamiltonian.is_hermitian(1e-10))
        throw ContractViolation("ground_state_fci requires a Hermitian polynomial");

    EigenMethod method = options.method;
    if (method == EigenMethod::automatic)
        method = n <= kAutoDenseSites ? EigenMethod::dense : EigenMethod::lanczos;
    if (method == EigenMethod::dense) {
        require(n <= kMaxDenseSites, "dense fallback supports at most 12 sites");
        PauliPolynomial op_poly = hamiltonian;
        if (sector)
            op_poly += sector_shift(n, *sector, ordering);
        return dense_ground_state(SparseOperator(op_poly));
    }
    require(n <= kMaxLanczosSites, "Lanczos supports at most 20 sites");
    const SparseOperator op(hamiltonian);
    std::vector<std::uint64_t> rows;
    if (sector)
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
            if (in_sector(b, n, *sector, ordering))
                rows.push_back(b);
    return lanczos(op, start_vector(n, options.seed, sector, ordering), options, rows);
}

double hf_energy(const MolecularIntegrals& ints, SiteOrdering ordering) {
    const SpinOrbitalIntegrals so(ints, ordering);
    const auto occ = aufbau_occupied_sites(ints.n_orb(), ints.n_elec(), ints.ms2(), ordering);
    double one = 0.0;
    double two = 0.0;
    for (auto p : occ) {
        one += so.hso(p, p);
        for (auto q : occ)
            two += so.antisymmetrized(p, q, p, q);
    }
    return ints.e_core() + one + 0.5 * two;
}

Eigen::VectorXcd basis_state(std::size_t n_sites, const std::vector<std::size_t>& occupied) {
    require(n_sites <= kMaxSparseSites, "basis states limited to 24 sites");
    std::uint64_t index = 0;
    for (auto k : occupied) {
        require(k < n_sites, "occupied site out of range");
        index |= std::uint64_t{1} << k;
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::uint64_t{1} << n_sites));
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return v;
}

cplx expectation_statevector_complex(const Eigen::VectorXcd& v, const PauliPolynomial& obs) {
    require(obs.n_sites() <= kMaxSparseSites &&
                static_cast<std::uint64_t>(v.size()) == (std::uint64_t{1} << obs.n_sites()),
            "statevector length " + std::to_string(v.size()) + " does not match a " +
                std::to_string(obs.n_sites()) + "-site observable");
    require(std::abs(v.norm() - 1.0) <= 1e-8, "statevector is not normalized");
    const SparseOperator op(obs);
    return v.dot(op.apply(v));
}

double expectation_statevector(const Eigen::VectorXcd& v, const PauliPolynomial& obs) {
    const cplx value = expectation_statevector_complex(v, obs);
    if (std::abs(value.imag()) > 1e-9)
        throw NumericalError("statevector expectation has imaginary residue " +
                             std::to_string(value.imag()));
    return value.real();
}

} // namespace qcmps
