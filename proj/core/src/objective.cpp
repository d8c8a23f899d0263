#include "qcmps/objective.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace qcmps {

namespace {

constexpr double kImagTol = 1e-9;
constexpr std::size_t kEnvChunk = 128;

Eigen::Map<const Eigen::VectorXcd> vec(const Eigen::MatrixXcd& m) {
    return {m.data(), m.size()};
}

// t = [vec T^0; vec T^1] with vec T^i[u + D v] = T^i(u, v) = U(i D + v, u).
Eigen::VectorXcd stacked_tensor(const Eigen::MatrixXcd& isometry) {
    const Eigen::Index d = isometry.cols();
    Eigen::VectorXcd t(2 * d * d);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index v = 0; v < d; ++v)
            for (Eigen::Index u = 0; u < d; ++u)
                t[i * d * d + u + d * v] = isometry(i * d + v, u);
    return t;
}

// Per-site accumulators of sum_t c_t vec(L_t) vec(R_t)^T, one per letter.
struct SiteAccumulator {
    std::array<Eigen::MatrixXcd, 4> w; // indexed by PauliLetter

    explicit SiteAccumulator(Eigen::Index d2) {
        for (auto& m : w)
            m = Eigen::MatrixXcd::Zero(d2, d2);
    }
};

// Omega[(i' D^2 + u' + D v'), (i D^2 + u + D v)] = sum_letter sigma[i'][i] W_letter[u' + D u, v + D v'].
Eigen::MatrixXcd assemble_omega(const SiteAccumulator& acc, Eigen::Index d) {
    const Eigen::Index d2 = d * d;
    const cplx i_unit{0.0, 1.0};
    const auto& wi = acc.w[static_cast<int>(PauliLetter::I)];
    const auto& wx = acc.w[static_cast<int>(PauliLetter::X)];
    const auto& wy = acc.w[static_cast<int>(PauliLetter::Y)];
    const auto& wz = acc.w[static_cast<int>(PauliLetter::Z)];
    Eigen::MatrixXcd omega(2 * d2, 2 * d2);
    for (Eigen::Index vp = 0; vp < d; ++vp)
        for (Eigen::Index up = 0; up < d; ++up)
            for (Eigen::Index v = 0; v < d; ++v)
                for (Eigen::Index u = 0; u < d; ++u) {
                    const Eigen::Index r = up + d * u;
                    const Eigen::Index c = v + d * vp;
                    const Eigen::Index row = up + d * vp;
                    const Eigen::Index col = u + d * v;
                    omega(row, col) = wi(r, c) + wz(r, c);
                    omega(d2 + row, d2 + col) = wi(r, c) - wz(r, c);
                    omega(d2 + row, col) = wx(r, c) + i_unit * wy(r, c);
                    omega(row, d2 + col) = wx(r, c) - i_unit * wy(r, c);
                }
    return omega;
}

} // namespace

std::string to_string(GradientMode mode) {
    return mode == GradientMode::central_fd ? "central_fd" : "blockwise_env";
}

GradientMode parse_gradient_mode(std::string_view text) {
    if (text == "central_fd")
        return GradientMode::central_fd;
    if (text == "blockwise_env")
        return GradientMode::blockwise_env;
    throw ContractViolation("unknown gradient mode '" + std::string(text) + "'");
}

CompiledObjective::CompiledObjective(const AnsatzSpec& ansatz, const PauliPolynomial& hamiltonian,
                                     const PauliPolynomial& number_op, const PauliPolynomial& s2_op,
                                     const PenaltySpec& pen, BoundaryMode mode)
    : ansatz_(ansatz), mode_(mode) {
    ansatz_.block.validate();
    const std::size_t n = ansatz.n_sites;
    require(hamiltonian.n_sites() == n && number_op.n_sites() == n && s2_op.n_sites() == n,
            "objective operators must act on the ansatz's " + std::to_string(n) + " sites");
    require(pen.mu_n >= 0.0 && pen.mu_s >= 0.0, "penalty weights must be non-negative");

    const auto n_shift = number_op - PauliPolynomial::identity(n, static_cast<double>(pen.target_n_elec));
    const auto s_shift = s2_op - PauliPolynomial::identity(n, pen.target_s * (pen.target_s + 1.0));
    const auto n_pen = (n_shift * n_shift).real_hermitian();
    const auto s_pen = (s_shift * s_shift).real_hermitian();

    const PauliPolynomial* columns[kColumns] = {nullptr, &hamiltonian, &n_pen, &s_pen, &number_op, &s2_op, nullptr};
    strings_.push_back(PauliString{});
    for (const auto* poly : columns)
        if (poly)
            for (const auto& t : poly->terms())
                strings_.push_back(t.string);
    std::sort(strings_.begin(), strings_.end(), site_major_less);
    strings_.erase(std::unique(strings_.begin(), strings_.end()), strings_.end());

    coeffs_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(strings_.size()), kColumns);
    for (std::size_t t = 0; t < strings_.size(); ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        for (int c = kEnergy; c <= kSpin2; ++c)
            coeffs_(row, c) = columns[c]->coefficient(strings_[t]);
        coeffs_(row, kObjective) = coeffs_(row, kEnergy) + pen.mu_n * coeffs_(row, kNPenalty) +
                                   pen.mu_s * coeffs_(row, kSPenalty);
        coeffs_(row, kNorm) = strings_[t].is_identity() ? 1.0 : 0.0;
    }
}

ObjectiveComponents CompiledObjective::evaluate(const QcmpsState& state) const {
    require(state.n_sites() == ansatz_.n_sites, "state does not match the objective's site count");
    const auto values = pauli_expectations(state, strings_, mode_);
    std::vector<cplx> weighted(values.size());
    double out[kColumns] = {};
    for (int c = 0; c < kNorm; ++c) {
        for (std::size_t t = 0; t < values.size(); ++t)
            weighted[t] = coeffs_(static_cast<Eigen::Index>(t), c) * values[t];
        const cplx sum = pairwise_sum(weighted);
        if (std::abs(sum.imag()) > kImagTol)
            throw NumericalError("objective component has imaginary residue " + std::to_string(sum.imag()));
        out[c] = sum.real();
    }
    return {out[kObjective], out[kEnergy], out[kNPenalty], out[kSPenalty], out[kNumber], out[kSpin2]};
}

ObjectiveComponents CompiledObjective::evaluate(std::span<const double> params) const {
    return evaluate(QcmpsState::from_parameters(ansatz_, params));
}

double CompiledObjective::value(std::span<const double> params) const { return evaluate(params).objective; }

Eigen::VectorXd CompiledObjective::gradient(std::span<const double> params, GradientMode mode, double step) const {
    require(step > 0.0, "finite-difference step must be positive");
    require(params.size() == ansatz_.total_parameters(), "parameter vector has the wrong length");
    return mode == GradientMode::central_fd ? gradient_central(params, step) : gradient_blockwise(params, step);
}

Eigen::VectorXd CompiledObjective::gradient_central(std::span<const double> params, double step) const {
    Eigen::VectorXd grad(static_cast<Eigen::Index>(params.size()));
    parallel_for(params.size(), [&](std::size_t j) {
        std::vector<double> p(params.begin(), params.end());
        p[j] = params[j] + step;
        const double plus = value(p);
        p[j] = params[j] - step;
        const double minus = value(p);
        grad[static_cast<Eigen::Index>(j)] = (plus - minus) / (2.0 * step);
    });
    return grad;
}

// Every string's value is a quadratic form in the tensor of any one site,
// t^+ Omega_k t, with Omega_k built from the string's left and right
// environments at k. Perturbing a parameter of block k only changes t, so
// each finite-difference probe costs one small quadratic form.
Eigen::VectorXd CompiledObjective::gradient_blockwise(std::span<const double> params, double step) const {
    const std::size_t n = ansatz_.n_sites;
    const auto d = static_cast<Eigen::Index>(ansatz_.block.bond_dim());
    const Eigen::Index d2 = d * d;
    const bool project = mode_ == BoundaryMode::project;

    std::vector<std::unique_ptr<BlockCircuit>> blocks(n);
    std::vector<SiteTensor> tensors(n);
    parallel_for(n, [&](std::size_t k) {
        blocks[k] = std::make_unique<BlockCircuit>(ansatz_.block, ansatz_.slice(params, k));
        tensors[k] = tensor_from_columns(blocks[k]->isometry());
    });

    std::vector<Eigen::MatrixXcd> right_id(n + 1); // right_id[k]: identity over sites >= k
    right_id[n] = right_boundary(d, mode_);
    for (std::size_t k = n; k-- > 0;)
        right_id[k] = transfer_right(right_id[k + 1], tensors[k], PauliLetter::I);

    const int n_cols = project ? 2 : 1;
    const int col_index[2] = {kObjective, kNorm};
    std::vector<std::vector<SiteAccumulator>> acc(n_cols, std::vector<SiteAccumulator>(n, SiteAccumulator(d2)));
    // tail[c][h + 1] = sum over strings with highest site h of c_t L_t,h+1.
    std::vector<std::vector<Eigen::MatrixXcd>> tail(n_cols, std::vector<Eigen::MatrixXcd>(n + 1, Eigen::MatrixXcd::Zero(d, d)));

    struct ChunkEnvs {
        // Per site: columns vec(L_t,k), vec(R_t,k), with the string index and letter of each column.
        std::vector<Eigen::MatrixXcd> left, right;
        std::vector<std::vector<std::size_t>> string_of;
        std::vector<std::vector<PauliLetter>> letter_of;
        std::vector<std::pair<std::size_t, Eigen::MatrixXcd>> tails; // (string, L_t,h+1)
    };

    const std::size_t n_chunks = (strings_.size() + kEnvChunk - 1) / kEnvChunk;
    const std::size_t batch = std::max<std::size_t>(1, num_threads());
    for (std::size_t first = 0; first < n_chunks; first += batch) {
        const std::size_t count = std::min(batch, n_chunks - first);
        std::vector<ChunkEnvs> envs(count);
        parallel_for(count, [&](std::size_t b) {
            ChunkEnvs& ce = envs[b];
            ce.left.assign(n, Eigen::MatrixXcd(d2, static_cast<Eigen::Index>(kEnvChunk)));
            ce.right.assign(n, Eigen::MatrixXcd(d2, static_cast<Eigen::Index>(kEnvChunk)));
            ce.string_of.assign(n, {});
            ce.letter_of.assign(n, {});
            std::vector<Eigen::MatrixXcd> left(n + 1);
            left[0] = left_boundary(d);
            std::size_t valid = 0;
            const PauliString* prev = nullptr;
            const std::size_t begin = (first + b) * kEnvChunk;
            const std::size_t end = std::min(strings_.size(), begin + kEnvChunk);
            Eigen::MatrixXcd right;
            for (std::size_t t = begin; t < end; ++t) {
                const auto& s = strings_[t];
                if (s.is_identity()) {
                    ce.tails.emplace_back(t, left[0]);
                    continue;
                }
                const std::size_t h = s.highest_site();
                std::size_t start = 0;
                if (prev) {
                    while (start < valid && s.letter(start) == prev->letter(start))
                        ++start;
                }
                for (std::size_t k = start; k <= h; ++k)
                    left[k + 1] = transfer_left(left[k], tensors[k], s.letter(k));
                valid = h + 1;
                prev = &s;
                ce.tails.emplace_back(t, left[h + 1]);
                right = right_id[h + 1];
                for (std::size_t k = h + 1; k-- > 0;) {
                    const auto col = static_cast<Eigen::Index>(ce.string_of[k].size());
                    ce.left[k].col(col) = vec(left[k]);
                    ce.right[k].col(col) = vec(right);
                    ce.string_of[k].push_back(t);
                    ce.letter_of[k].push_back(s.letter(k));
                    if (k > 0)
                        right = transfer_right(right, tensors[k], s.letter(k));
                }
            }
        });

        parallel_for(n, [&](std::size_t k) {
            for (const auto& ce : envs) {
                const auto m = static_cast<Eigen::Index>(ce.string_of[k].size());
                if (m == 0)
                    continue;
                for (int c = 0; c < n_cols; ++c)
                    for (int letter = 0; letter < 4; ++letter) {
                        Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(m);
                        bool any = false;
                        for (Eigen::Index j = 0; j < m; ++j)
                            if (static_cast<int>(ce.letter_of[k][j]) == letter) {
                                weights[j] = coeffs_(static_cast<Eigen::Index>(ce.string_of[k][j]), col_index[c]);
                                any = any || weights[j] != cplx{};
                            }
                        if (any)
                            acc[c][k].w[letter].noalias() +=
                                ce.left[k].leftCols(m) * weights.asDiagonal() * ce.right[k].leftCols(m).transpose();
                    }
            }
        });
        for (const auto& ce : envs)
            for (const auto& [t, l] : ce.tails) {
                const auto& s = strings_[t];
                const std::size_t slot = s.is_identity() ? 0 : s.highest_site() + 1;
                for (int c = 0; c < n_cols; ++c)
                    tail[c][slot] += coeffs_(static_cast<Eigen::Index>(t), col_index[c]) * l;
            }
    }

    // Strings whose support ends before site k contribute (sum c_t L_t,k) x R_id,k with letter I.
    for (int c = 0; c < n_cols; ++c) {
        Eigen::MatrixXcd running = tail[c][0];
        for (std::size_t k = 0; k < n; ++k) {
            acc[c][k].w[0].noalias() += vec(running) * vec(right_id[k + 1]).transpose();
            running = transfer_left(running, tensors[k], PauliLetter::I) + tail[c][k + 1];
        }
    }

    Eigen::VectorXd grad(static_cast<Eigen::Index>(params.size()));
    const std::size_t per_block = ansatz_.parameters_per_block();
    parallel_for(n, [&](std::size_t k) {
        const Eigen::MatrixXcd omega = assemble_omega(acc[0][k], d);
        const Eigen::MatrixXcd omega_norm = project ? assemble_omega(acc[1][k], d) : Eigen::MatrixXcd();
        auto f = [&](const Eigen::MatrixXcd& isometry) {
            const Eigen::VectorXcd t = stacked_tensor(isometry);
            const cplx num = t.dot(omega * t);
            return project ? (num / t.dot(omega_norm * t)).real() : num.real();
        };
        const auto slice = ansatz_.slice(params, k);
        for (std::size_t j = 0; j < per_block; ++j) {
            const double plus = f(blocks[k]->isometry_with(j, slice[j] + step));
            const double minus = f(blocks[k]->isometry_with(j, slice[j] - step));
            grad[static_cast<Eigen::Index>(ansatz_.slice_offset(k) + j)] = (plus - minus) / (2.0 * step);
        }
    });
    return grad;
}

} // namespace qcmps
