#include "qcmps/orbital.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace qcmps {

namespace {

constexpr double kOrthoTol = 1e-8;
constexpr double kTraceTol = 1e-9;
constexpr double kNegativeEigTol = -1e-10;

cplx i_power(std::size_t k) {
    switch (k % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

void require_orthogonal(const Eigen::MatrixXd& u, std::size_t n) {
    require(u.rows() == static_cast<Eigen::Index>(n) && u.cols() == static_cast<Eigen::Index>(n),
            "rotation matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    const double residual =
        (u.transpose() * u - Eigen::MatrixXd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    require(residual <= kOrthoTol,
            "rotation matrix is not orthogonal (residual " + std::to_string(residual) + ")");
}

// Local modes of the orbitals in `orbitals`, alpha before beta per orbital.
std::vector<std::size_t> local_modes(std::span<const std::size_t> orbitals, std::size_t n_orb,
                                     SiteOrdering ordering) {
    std::vector<std::size_t> modes;
    for (auto p : orbitals) {
        modes.push_back(spin_orbital_site(p, Spin::alpha, n_orb, ordering));
        modes.push_back(spin_orbital_site(p, Spin::beta, n_orb, ordering));
    }
    return modes;
}

// Configuration index c over the local modes: mode j occupied iff bit
// (2*(orbital slot) + spin) is set, with the first orbital most significant
// in the 4 * a_p + a_q layout.
std::vector<std::size_t> occupied_modes(std::size_t config, std::span<const std::size_t> modes) {
    const std::size_t n_orbs = modes.size() / 2;
    std::vector<std::size_t> occ;
    for (std::size_t slot = 0; slot < n_orbs; ++slot) {
        const std::size_t local = (config >> (2 * (n_orbs - 1 - slot))) & 3U;
        if (local & 1U)
            occ.push_back(modes[2 * slot]);
        if (local & 2U)
            occ.push_back(modes[2 * slot + 1]);
    }
    return occ;
}

struct ConfigQuantumNumbers {
    int n;
    int ms2;
};

ConfigQuantumNumbers quantum_numbers(std::size_t config, std::size_t n_orbs) {
    ConfigQuantumNumbers qn{0, 0};
    for (std::size_t slot = 0; slot < n_orbs; ++slot) {
        const std::size_t local = (config >> (2 * slot)) & 3U;
        if (local & 1U) {
            ++qn.n;
            ++qn.ms2;
        }
        if (local & 2U) {
            ++qn.n;
            --qn.ms2;
        }
    }
    return qn;
}

// rho[A][B] = <C_B^+ P_vac C_A>, where C_A^+ creates configuration A from the
// local vacuum and P_vac projects the local modes onto it.
std::vector<PauliPolynomial> rdm_polynomials(std::span<const std::size_t> modes, std::size_t n_sites) {
    const std::size_t dim = std::size_t{1} << modes.size();
    PauliPolynomial vacuum = PauliPolynomial::identity(n_sites);
    for (auto m : modes) {
        PauliString z;
        z.set(m, PauliLetter::Z);
        vacuum = vacuum * PauliPolynomial(n_sites, {{0.5, PauliString{}}, {0.5, z}});
    }
    std::vector<PauliPolynomial> creators(dim);
    std::vector<PauliPolynomial> annihilators(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        FermionOperator create_op;
        for (auto m : occupied_modes(c, modes))
            create_op.ladder.push_back(create(m));
        creators[c] = jordan_wigner(create_op, n_sites);
        annihilators[c] = creators[c].adjoint();
    }
    std::vector<PauliPolynomial> out(dim * dim);
    parallel_for(dim * dim, [&](std::size_t ab) {
        const std::size_t a = ab / dim;
        const std::size_t b = ab % dim;
        out[ab] = creators[b] * vacuum * annihilators[a];
    });
    return out;
}

struct CompiledRdm {
    std::size_t dim;
    std::size_t n_orbs;
    std::vector<PauliPolynomial> elements;
};

// Evaluates every distinct string once and assembles the density matrices.
std::vector<OrbitalRdm> evaluate_rdms(const StateSource& source, std::span<const CompiledRdm> rdms) {
    std::unordered_map<PauliString, std::size_t, PauliStringHash> index;
    std::vector<PauliString> strings;
    for (const auto& rdm : rdms)
        for (const auto& poly : rdm.elements)
            for (const auto& t : poly.terms())
                if (index.emplace(t.string, strings.size()).second)
                    strings.push_back(t.string);
    const auto values = source.expectations(strings);

    std::vector<OrbitalRdm> out;
    out.reserve(rdms.size());
    for (const auto& rdm : rdms) {
        OrbitalRdm r;
        r.rho = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rdm.dim), static_cast<Eigen::Index>(rdm.dim));
        for (std::size_t a = 0; a < rdm.dim; ++a)
            for (std::size_t b = 0; b < rdm.dim; ++b) {
                cplx v{};
                for (const auto& t : rdm.elements[a * rdm.dim + b].terms())
                    v += t.coeff * values[index.at(t.string)];
                r.rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
                const auto qa = quantum_numbers(a, rdm.n_orbs);
                const auto qb = quantum_numbers(b, rdm.n_orbs);
                if (qa.n != qb.n || qa.ms2 != qb.ms2)
                    r.selection_rule_residual = std::max(r.selection_rule_residual, std::abs(v));
            }
        r.rho = 0.5 * (r.rho + r.rho.adjoint()).eval();
        const double trace_err = std::abs(r.rho.trace() - cplx{1.0});
        if (trace_err > kTraceTol)
            throw NumericalError("orbital density matrix trace deviates from 1 by " +
                                 std::to_string(trace_err));
        out.push_back(std::move(r));
    }
    return out;
}

CompiledRdm compile_rdm(std::span<const std::size_t> orbitals, std::size_t n_sites, SiteOrdering ordering) {
    const auto modes = local_modes(orbitals, n_sites / 2, ordering);
    return {std::size_t{1} << modes.size(), orbitals.size(), rdm_polynomials(modes, n_sites)};
}

std::size_t checked_orbital_count(const StateSource& source) {
    require(source.n_sites() % 2 == 0 && source.n_sites() >= 2,
            "orbital density matrices need an even number of spin-orbital sites");
    return source.n_sites() / 2;
}

} // namespace

Eigen::MatrixXd exponentiate_kappa(const Eigen::MatrixXd& kappa) {
    require(kappa.rows() == kappa.cols(), "kappa must be square");
    if (kappa.size() == 0)
        return kappa;
    const double asym = (kappa + kappa.transpose()).cwiseAbs().maxCoeff();
    require(asym < 1e-12, "kappa is not antisymmetric (max |k + k^T| = " + std::to_string(asym) + ")");
    // i*kappa is Hermitian: i kappa = V L V^+, so exp(-kappa) = V exp(i L) V^+.
    const Eigen::MatrixXcd h = cplx{0.0, 1.0} * kappa.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecomposition of kappa failed");
    const Eigen::VectorXcd phases =
        (cplx{0.0, 1.0} * solver.eigenvalues().cast<cplx>()).array().exp().matrix();
    const Eigen::MatrixXcd u = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    return u.real();
}

OrbitalRotation OrbitalRotation::from_kappa(const Eigen::MatrixXd& kappa) {
    return {kappa, exponentiate_kappa(kappa)};
}

OrbitalRotation OrbitalRotation::from_matrix(const Eigen::MatrixXd& u) {
    require_orthogonal(u, static_cast<std::size_t>(u.rows()));
    return {Eigen::MatrixXd{}, u};
}

MolecularIntegrals rotate_integrals(const MolecularIntegrals& ints, const Eigen::MatrixXd& u) {
    const std::size_t n = ints.n_orb();
    require_orthogonal(u, n);

    MolecularIntegrals out(n, ints.n_elec(), ints.ms2());
    out.set_e_core(ints.e_core());
    out.set_source_label(ints.source_label().empty() ? "rotated" : ints.source_label() + " (rotated)");

    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q) {
            double acc = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                double inner = 0.0;
                for (std::size_t b = 0; b < n; ++b)
                    inner += ints.h1(a, b) * u(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(q));
                acc += u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p)) * inner;
            }
            out.set_h1(p, q, acc);
        }

    const std::size_t n2 = n * n;
    const std::size_t n3 = n2 * n;
    std::vector<double> cur(n3 * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                for (std::size_t d = 0; d < n; ++d)
                    cur[a * n3 + b * n2 + c * n + d] = ints.g2(a, b, c, d);

    // Transform one index per pass; each pass writes a distinct leading-index slab per task.
    const std::size_t strides[4] = {n3, n2, n, 1};
    std::vector<double> next(cur.size());
    for (int pos = 0; pos < 4; ++pos) {
        const std::size_t stride = strides[pos];
        parallel_for(n, [&](std::size_t i0) {
            for (std::size_t rest = 0; rest < n3; ++rest) {
                const std::size_t flat = i0 * n3 + rest;
                const std::size_t target = (flat / stride) % n;
                const std::size_t base = flat - target * stride;
                double acc = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                    acc += u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(target)) *
                           cur[base + a * stride];
                next[flat] = acc;
            }
        });
        cur.swap(next);
    }

    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q <= p; ++q)
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t s = 0; s <= r; ++s)
                    if (p * (p + 1) / 2 + q >= r * (r + 1) / 2 + s)
                        out.set_g2(p, q, r, s, cur[p * n3 + q * n2 + r * n + s]);
    return out;
}

Eigen::MatrixXd parse_matrix(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0')
                throw ParseError("non-numeric matrix entry '" + token + "'", line_no);
            row.push_back(v);
        }
        if (row.empty())
            continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("row has " + std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(rows.front().size()),
                             line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ParseError("matrix file contains no rows", line_no);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open matrix file " + path.string());
    return parse_matrix(in);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    std::ostringstream buf;
    buf << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            buf << (j ? " " : "") << m(i, j);
        buf << '\n';
    }
    out << buf.str();
}

QcmpsSource::QcmpsSource(QcmpsState state, BoundaryMode mode, std::string label)
    : state_(std::move(state)), mode_(mode), label_(std::move(label)) {}

std::vector<cplx> QcmpsSource::expectations(std::span<const PauliString> strings) const {
    return pauli_expectations(state_, strings, mode_);
}

StatevectorSource::StatevectorSource(Eigen::VectorXcd vector, std::string label)
    : v_(std::move(vector)), n_sites_(0), label_(std::move(label)) {
    const auto size = static_cast<std::uint64_t>(v_.size());
    require(size >= 2 && std::has_single_bit(size), "statevector length must be a power of two");
    n_sites_ = static_cast<std::size_t>(std::countr_zero(size));
    require(std::abs(v_.norm() - 1.0) <= 1e-8, "statevector is not normalized");
}

std::vector<cplx> StatevectorSource::expectations(std::span<const PauliString> strings) const {
    std::vector<cplx> out(strings.size());
    const auto dim = static_cast<std::uint64_t>(v_.size());
    parallel_for(strings.size(), [&](std::size_t t) {
        const auto& s = strings[t];
        require(s.is_identity() || s.highest_site() < n_sites_, "string exceeds statevector sites");
        const std::uint64_t x = s.x_mask()[0];
        const std::uint64_t z = s.z_mask()[0];
        cplx acc{};
        for (std::uint64_t b = 0; b < dim; ++b) {
            const cplx term = std::conj(v_[static_cast<Eigen::Index>(b ^ x)]) * v_[static_cast<Eigen::Index>(b)];
            acc += (std::popcount(b & z) & 1) ? -term : term;
        }
        out[t] = i_power(s.y_count()) * acc;
    });
    return out;
}

OrbitalRdm one_orbital_rdm(const StateSource& source, std::size_t p, SiteOrdering ordering) {
    const std::size_t n_orb = checked_orbital_count(source);
    require(p < n_orb, "orbital index out of range");
    const std::size_t orbs[] = {p};
    const CompiledRdm rdm = compile_rdm(orbs, source.n_sites(), ordering);
    return evaluate_rdms(source, std::span(&rdm, 1)).front();
}

OrbitalRdm two_orbital_rdm(const StateSource& source, std::size_t p, std::size_t q, SiteOrdering ordering) {
    const std::size_t n_orb = checked_orbital_count(source);
    require(p < n_orb && q < n_orb, "orbital index out of range");
    require(p != q, "two-orbital density matrix needs distinct orbitals");
    const std::size_t orbs[] = {p, q};
    const CompiledRdm rdm = compile_rdm(orbs, source.n_sites(), ordering);
    return evaluate_rdms(source, std::span(&rdm, 1)).front();
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("density matrix eigendecomposition failed");
    double s = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        double w = solver.eigenvalues()[k];
        if (w < kNegativeEigTol)
            throw NumericalError("density matrix has eigenvalue " + std::to_string(w));
        w = std::clamp(w, 0.0, 1.0);
        if (w > 0.0)
            s -= w * std::log(w);
    }
    return s;
}

EntanglementReport interaction_matrix(const StateSource& source, SiteOrdering ordering) {
    const std::size_t n_orb = checked_orbital_count(source);
    const std::size_t n_sites = source.n_sites();

    std::vector<CompiledRdm> compiled;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t p = 0; p < n_orb; ++p) {
        const std::size_t orbs[] = {p};
        compiled.push_back(compile_rdm(orbs, n_sites, ordering));
    }
    for (std::size_t p = 0; p < n_orb; ++p)
        for (std::size_t q = p + 1; q < n_orb; ++q) {
            const std::size_t orbs[] = {p, q};
            compiled.push_back(compile_rdm(orbs, n_sites, ordering));
            pairs.emplace_back(p, q);
        }
    const auto rdms = evaluate_rdms(source, compiled);

    EntanglementReport report;
    report.source = source.describe();
    report.s1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_orb));
    report.s2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_orb), static_cast<Eigen::Index>(n_orb));
    report.i_pq = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_orb), static_cast<Eigen::Index>(n_orb));
    for (const auto& r : rdms)
        report.max_selection_rule_residual = std::max(report.max_selection_rule_residual, r.selection_rule_residual);
    for (std::size_t p = 0; p < n_orb; ++p)
        report.s1[static_cast<Eigen::Index>(p)] = von_neumann_entropy(rdms[p].rho);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [p, q] = pairs[k];
        const auto ip = static_cast<Eigen::Index>(p);
        const auto iq = static_cast<Eigen::Index>(q);
        const double s2 = von_neumann_entropy(rdms[n_orb + k].rho);
        report.s2(ip, iq) = report.s2(iq, ip) = s2;
        const double mi = 0.5 * (report.s1[ip] + report.s1[iq] - s2);
        report.i_pq(ip, iq) = report.i_pq(iq, ip) = mi;
    }
    return report;
}

} // namespace qcmps
