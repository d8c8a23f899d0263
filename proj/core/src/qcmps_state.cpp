#include "qcmps/qcmps_state.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qcmps {

namespace {

constexpr double kUnitarityTol = 1e-8;
constexpr double kImagTol = 1e-9;
constexpr std::size_t kChunk = 128;

} // namespace

SiteTensor tensor_from_columns(const Eigen::MatrixXcd& columns) {
    const Eigen::Index d = columns.cols();
    require(d >= 1 && columns.rows() == 2 * d,
            "block columns must be 2D x D, got " + std::to_string(columns.rows()) + "x" +
                std::to_string(columns.cols()));
    SiteTensor t;
    // Row index of the unitary is (i, v) with i most significant; T^i[u][v] = U[(i,v), u].
    t.slice[0] = columns.topRows(d).transpose();
    t.slice[1] = columns.bottomRows(d).transpose();
    return t;
}

SiteTensor block_to_tensor(const Eigen::MatrixXcd& unitary) {
    const Eigen::Index dim = unitary.rows();
    require(dim >= 2 && dim == unitary.cols() && dim % 2 == 0,
            "block unitary must be square with even dimension");
    const Eigen::MatrixXcd residual =
        unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(dim, dim);
    require(residual.cwiseAbs().maxCoeff() <= kUnitarityTol,
            "block matrix is not unitary (residual " +
                std::to_string(residual.cwiseAbs().maxCoeff()) + ")");
    return tensor_from_columns(unitary.leftCols(dim / 2));
}

double check_canonical(const SiteTensor& t, CanonicalSide side) {
    const Eigen::Index d = t.bond_dim();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& s : t.slice)
        gram += side == CanonicalSide::right ? Eigen::MatrixXcd(s * s.adjoint())
                                             : Eigen::MatrixXcd(s.adjoint() * s);
    return (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

std::string to_string(BoundaryMode mode) { return mode == BoundaryMode::trace ? "trace" : "project"; }

BoundaryMode parse_boundary_mode(std::string_view text) {
    if (text == "trace")
        return BoundaryMode::trace;
    if (text == "project")
        return BoundaryMode::project;
    throw ContractViolation("unknown boundary mode '" + std::string(text) + "'");
}

QcmpsState::QcmpsState(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
    require(!sites_.empty(), "a QCMPS needs at least one site");
    const Eigen::Index d = sites_.front().bond_dim();
    for (const auto& s : sites_)
        require(s.bond_dim() == d && s.slice[0].cols() == d && s.slice[1].rows() == d &&
                    s.slice[1].cols() == d,
                "all site tensors must share one square bond dimension");
}

QcmpsState QcmpsState::from_parameters(const AnsatzSpec& ansatz, std::span<const double> params) {
    require(params.size() == ansatz.total_parameters(),
            "ansatz expects " + std::to_string(ansatz.total_parameters()) + " parameters, got " +
                std::to_string(params.size()));
    std::vector<SiteTensor> sites(ansatz.n_sites);
    parallel_for(ansatz.n_sites, [&](std::size_t k) {
        const BlockCircuit block(ansatz.block, ansatz.slice(params, k));
        sites[k] = tensor_from_columns(block.isometry());
    });
    return QcmpsState(std::move(sites));
}

Eigen::MatrixXcd transfer_left(const Eigen::MatrixXcd& env, const SiteTensor& t, PauliLetter s) {
    const Eigen::MatrixXcd a0 = env * t.slice[0];
    const Eigen::MatrixXcd a1 = env * t.slice[1];
    const cplx i_unit{0.0, 1.0};
    switch (s) {
    case PauliLetter::I: return t.slice[0].adjoint() * a0 + t.slice[1].adjoint() * a1;
    case PauliLetter::Z: return t.slice[0].adjoint() * a0 - t.slice[1].adjoint() * a1;
    case PauliLetter::X: return t.slice[1].adjoint() * a0 + t.slice[0].adjoint() * a1;
    case PauliLetter::Y: return i_unit * (t.slice[1].adjoint() * a0 - t.slice[0].adjoint() * a1);
    }
    return {};
}

Eigen::MatrixXcd transfer_right(const Eigen::MatrixXcd& env, const SiteTensor& t, PauliLetter s) {
    const Eigen::MatrixXcd b0 = t.slice[0] * env;
    const Eigen::MatrixXcd b1 = t.slice[1] * env;
    const cplx i_unit{0.0, 1.0};
    switch (s) {
    case PauliLetter::I: return b0 * t.slice[0].adjoint() + b1 * t.slice[1].adjoint();
    case PauliLetter::Z: return b0 * t.slice[0].adjoint() - b1 * t.slice[1].adjoint();
    case PauliLetter::X: return b0 * t.slice[1].adjoint() + b1 * t.slice[0].adjoint();
    case PauliLetter::Y: return i_unit * (b0 * t.slice[1].adjoint() - b1 * t.slice[0].adjoint());
    }
    return {};
}

Eigen::MatrixXcd left_boundary(Eigen::Index d) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(d, d);
    e(0, 0) = 1.0;
    return e;
}

Eigen::MatrixXcd right_boundary(Eigen::Index d, BoundaryMode mode) {
    return mode == BoundaryMode::trace ? Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(d, d))
                                       : left_boundary(d);
}

cplx pairwise_sum(std::span<const cplx> values) {
    if (values.size() <= 8)
        return std::accumulate(values.begin(), values.end(), cplx{});
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<cplx> pauli_expectations(const QcmpsState& state, std::span<const PauliString> strings,
                                     BoundaryMode mode) {
    const std::size_t n = state.n_sites();
    const Eigen::Index d = state.bond_dim();
    for (const auto& s : strings)
        require(s.is_identity() || s.highest_site() < n,
                "observable acts on site " + std::to_string(s.highest_site()) + " of a " +
                    std::to_string(n) + "-site state");

    // Identity tails close against precomputed right environments.
    std::vector<Eigen::MatrixXcd> right_id(n + 1);
    right_id[n] = right_boundary(d, mode);
    for (std::size_t k = n; k-- > 0;)
        right_id[k] = transfer_right(right_id[k + 1], state.site(k), PauliLetter::I);
    const cplx norm = right_id[0](0, 0);
    if (mode == BoundaryMode::project && std::abs(norm) < 1e-14)
        throw NumericalError("projected QCMPS has vanishing norm");

    std::vector<std::size_t> order(strings.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return site_major_less(strings[a], strings[b]);
    });

    std::vector<cplx> values(strings.size());
    const std::size_t n_chunks = (order.size() + kChunk - 1) / kChunk;
    parallel_for(n_chunks, [&](std::size_t chunk) {
        std::vector<Eigen::MatrixXcd> env(n + 1);
        env[0] = left_boundary(d);
        std::size_t valid = 0; // env[0..valid] match prev's letters
        const PauliString* prev = nullptr;
        const std::size_t end = std::min(order.size(), (chunk + 1) * kChunk);
        for (std::size_t pos = chunk * kChunk; pos < end; ++pos) {
            const auto& s = strings[order[pos]];
            const std::size_t depth = s.is_identity() ? 0 : s.highest_site() + 1;
            std::size_t start = 0;
            if (prev) {
                std::size_t shared = 0;
                while (shared < valid && s.letter(shared) == prev->letter(shared))
                    ++shared;
                start = shared;
            }
            for (std::size_t k = start; k < depth; ++k)
                env[k + 1] = transfer_left(env[k], state.site(k), s.letter(k));
            valid = depth;
            prev = &s;
            cplx v = (env[depth].transpose().cwiseProduct(right_id[depth])).sum();
            values[order[pos]] = mode == BoundaryMode::project ? v / norm : v;
        }
    });
    return values;
}

cplx expectation_complex(const QcmpsState& state, const PauliPolynomial& obs, BoundaryMode mode) {
    require(obs.n_sites() == state.n_sites(),
            "observable has " + std::to_string(obs.n_sites()) + " sites, state has " +
                std::to_string(state.n_sites()));
    std::vector<PauliString> strings;
    strings.reserve(obs.size());
    for (const auto& t : obs.terms())
        strings.push_back(t.string);
    const auto values = pauli_expectations(state, strings, mode);
    std::vector<cplx> weighted(values.size());
    for (std::size_t t = 0; t < values.size(); ++t)
        weighted[t] = obs.terms()[t].coeff * values[t];
    return pairwise_sum(weighted);
}

double expectation(const QcmpsState& state, const PauliPolynomial& obs, BoundaryMode mode) {
    const cplx value = expectation_complex(state, obs, mode);
    if (std::abs(value.imag()) > kImagTol)
        throw NumericalError("expectation has imaginary residue " + std::to_string(value.imag()) +
                             "; observable is not Hermitian");
    return value.real();
}

Eigen::VectorXcd QcmpsAmplitudes::bond_slice(Eigen::Index u) const {
    const auto size = Eigen::Index{1} << n_sites;
    return amplitudes.segment(u * size, size);
}

QcmpsAmplitudes to_statevector(const QcmpsState& state) {
    const std::size_t n = state.n_sites();
    const Eigen::Index d = state.bond_dim();
    const auto bond_bits = static_cast<std::size_t>(std::llround(std::log2(static_cast<double>(d))));
    require(n + bond_bits <= 24, "statevector expansion limited to N + log2(D) <= 24, got " +
                                     std::to_string(n + bond_bits));

    // rows[c] = e0^T T^{i_1} ... T^{i_k} for the config c of the first k sites.
    Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(1, d);
    rows(0, 0) = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        Eigen::MatrixXcd next(rows.rows() * 2, d);
        next.topRows(rows.rows()) = rows * state.site(k).slice[0];
        next.bottomRows(rows.rows()) = rows * state.site(k).slice[1];
        rows.swap(next);
    }
    QcmpsAmplitudes out;
    out.n_sites = n;
    out.bond_dim = d;
    out.amplitudes = Eigen::Map<const Eigen::VectorXcd>(rows.data(), rows.size());
    return out;
}

QcmpsState hartree_fock_state(std::size_t n_sites, int n_elec, SiteOrdering ordering,
                              std::optional<int> ms2, Eigen::Index bond_dim) {
    require(n_sites >= 2 && n_sites % 2 == 0, "spin-orbital site count must be even and positive");
    require(n_elec >= 0 && static_cast<std::size_t>(n_elec) <= n_sites,
            "electron count exceeds site count");
    require(bond_dim >= 1, "bond dimension must be positive");
    const auto occupied =
        aufbau_occupied_sites(n_sites / 2, n_elec, ms2.value_or(n_elec % 2), ordering);
    std::vector<SiteTensor> sites(n_sites);
    for (auto& t : sites) {
        t.slice[0] = Eigen::MatrixXcd::Identity(bond_dim, bond_dim);
        t.slice[1] = Eigen::MatrixXcd::Zero(bond_dim, bond_dim);
    }
    for (auto k : occupied)
        std::swap(sites[k].slice[0], sites[k].slice[1]);
    return QcmpsState(std::move(sites));
}

void dump_tensors(std::ostream& out, const QcmpsState& state) {
    std::ostringstream buf;
    buf << std::setprecision(17);
    for (std::size_t k = 0; k < state.n_sites(); ++k) {
        const auto& t = state.site(k);
        buf << "site " << k << " D " << t.bond_dim() << '\n';
        for (int i = 0; i < 2; ++i)
            for (Eigen::Index u = 0; u < t.bond_dim(); ++u) {
                for (Eigen::Index v = 0; v < t.bond_dim(); ++v)
                    buf << (v ? " " : "") << t.slice[i](u, v).real() << ' ' << t.slice[i](u, v).imag();
                buf << '\n';
            }
    }
    out << buf.str();
}

} // namespace qcmps
