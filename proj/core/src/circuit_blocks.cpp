#include "qcmps/circuit_blocks.hpp"

#include "qcmps/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qcmps {

using cplx = std::complex<double>;

std::string to_string(BlockType type) {
    switch (type) {
    case BlockType::LU: return "LU";
    case BlockType::AU: return "AU";
    case BlockType::G2: return "G2";
    }
    return "?";
}

BlockType parse_block_type(std::string_view text) {
    std::string up(text);
    for (auto& c : up)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "LU")
        return BlockType::LU;
    if (up == "AU")
        return BlockType::AU;
    if (up == "G2")
        return BlockType::G2;
    throw ContractViolation("unknown block type '" + std::string(text) + "'");
}

void BlockSpec::validate() const {
    require(n_qubits >= 2 && n_qubits <= 10, "block qubit count must lie in [2, 10]");
    require(n_layers >= 1, "block needs at least one entangling layer");
}

std::string to_string(const BlockSpec& spec) {
    return to_string(spec.type) + "-" + std::to_string(spec.n_qubits) + "(" +
           std::to_string(spec.n_layers) + ")";
}

namespace {

std::size_t entangler_count(const BlockSpec& spec) {
    const auto nq = static_cast<std::size_t>(spec.n_qubits);
    return spec.type == BlockType::LU ? nq - 1 : nq * (nq - 1);
}

Eigen::Matrix2cd u3(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    Eigen::Matrix2cd m;
    m << c, -std::polar(1.0, lambda) * s, std::polar(1.0, phi) * s, std::polar(1.0, phi + lambda) * c;
    return m;
}

Eigen::Matrix2cd pauli_matrix(int letter) {
    Eigen::Matrix2cd m;
    switch (letter) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
}

} // namespace

std::size_t parameter_count(const BlockSpec& spec) {
    spec.validate();
    const auto nq = static_cast<std::size_t>(spec.n_qubits);
    const auto nl = static_cast<std::size_t>(spec.n_layers);
    switch (spec.type) {
    case BlockType::LU: return 3 * nq + nl * (3 * (nq - 1) + 3 * nq);
    case BlockType::AU: return 3 * nq + nl * (3 * nq * (nq - 1) + 3 * nq);
    case BlockType::G2: return nl * (4 * nq + 16 * nq * (nq - 1));
    }
    return 0;
}

std::size_t Gate::param_count() const {
    switch (kind) {
    case GateKind::rotation3: return 3;
    case GateKind::rotation4: return 4;
    case GateKind::controlled3: return 3;
    case GateKind::generic2: return 16;
    }
    return 0;
}

std::vector<Gate> block_layout(const BlockSpec& spec) {
    spec.validate();
    const int nq = spec.n_qubits;
    std::vector<Gate> gates;
    std::size_t offset = 0;
    auto push = [&](GateKind kind, int a, int b) {
        gates.push_back({kind, a, b, offset});
        offset += gates.back().param_count();
    };
    auto rotation_layer = [&](GateKind kind) {
        for (int q = 0; q < nq; ++q)
            push(kind, q, -1);
    };

    if (spec.type == BlockType::G2) {
        for (int layer = 0; layer < spec.n_layers; ++layer) {
            rotation_layer(GateKind::rotation4);
            for (int a = 0; a < nq; ++a)
                for (int b = 0; b < nq; ++b)
                    if (a != b)
                        push(GateKind::generic2, a, b);
        }
        return gates;
    }

    rotation_layer(GateKind::rotation3);
    for (int layer = 0; layer < spec.n_layers; ++layer) {
        if (spec.type == BlockType::LU) {
            for (int a = 0; a + 1 < nq; ++a)
                push(GateKind::controlled3, a, a + 1);
        } else {
            for (int a = 0; a < nq; ++a)
                for (int b = 0; b < nq; ++b)
                    if (a != b)
                        push(GateKind::controlled3, a, b);
        }
        rotation_layer(GateKind::rotation3);
    }
    return gates;
}

Eigen::MatrixXcd gate_matrix(GateKind kind, std::span<const double> p) {
    switch (kind) {
    case GateKind::rotation3: return u3(p[0], p[1], p[2]);
    case GateKind::rotation4: return std::polar(1.0, p[3]) * u3(p[0], p[1], p[2]);
    case GateKind::controlled3: {
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
        m.bottomRightCorner<2, 2>() = u3(p[0], p[1], p[2]);
        return m;
    }
    case GateKind::generic2: {
        Eigen::Matrix4cd generator = Eigen::Matrix4cd::Zero();
        for (int m = 0; m < 16; ++m)
            if (p[m] != 0.0)
                generator += p[m] * kron(pauli_matrix(m / 4), pauli_matrix(m % 4));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(generator);
        Eigen::Vector4cd phases;
        for (int k = 0; k < 4; ++k)
            phases[k] = std::polar(1.0, eig.eigenvalues()[k]);
        return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    }
    }
    throw ContractViolation("unknown gate kind");
}

void apply_gate(const Eigen::MatrixXcd& local, const Gate& gate, int n_qubits,
                Eigen::MatrixXcd& m) {
    const Eigen::Index rows = m.rows();
    if (gate.target < 0) {
        const Eigen::Index bit = Eigen::Index{1} << (n_qubits - 1 - gate.qubit);
        const cplx u00 = local(0, 0), u01 = local(0, 1), u10 = local(1, 0), u11 = local(1, 1);
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (r & bit)
                continue;
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                const cplx a = m(r, c);
                const cplx b = m(r | bit, c);
                m(r, c) = u00 * a + u01 * b;
                m(r | bit, c) = u10 * a + u11 * b;
            }
        }
        return;
    }
    const Eigen::Index hi = Eigen::Index{1} << (n_qubits - 1 - gate.qubit);
    const Eigen::Index lo = Eigen::Index{1} << (n_qubits - 1 - gate.target);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (r & (hi | lo))
            continue;
        const Eigen::Index idx[4] = {r, r | lo, r | hi, r | hi | lo};
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            cplx in[4];
            for (int k = 0; k < 4; ++k)
                in[k] = m(idx[k], c);
            for (int k = 0; k < 4; ++k)
                m(idx[k], c) = local(k, 0) * in[0] + local(k, 1) * in[1] + local(k, 2) * in[2] +
                               local(k, 3) * in[3];
        }
    }
}

Eigen::MatrixXcd build_block_unitary(const BlockSpec& spec, std::span<const double> params) {
    require(params.size() == parameter_count(spec),
            "block " + to_string(spec) + " expects " + std::to_string(parameter_count(spec)) +
                " parameters, got " + std::to_string(params.size()));
    const auto dim = static_cast<Eigen::Index>(spec.dim());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& gate : block_layout(spec))
        apply_gate(gate_matrix(gate.kind, params.subspan(gate.param_offset, gate.param_count())),
                   gate, spec.n_qubits, u);
    return u;
}

std::uint64_t estimate_elementary_gates(const BlockSpec& spec, std::size_t n_sites) {
    spec.validate();
    const auto nq = static_cast<std::uint64_t>(spec.n_qubits);
    const auto nl = static_cast<std::uint64_t>(spec.n_layers);
    const std::uint64_t entanglers = entangler_count(spec);
    const std::uint64_t per_block = spec.type == BlockType::G2
                                        ? nl * (nq + 19 * entanglers)
                                        : nq + nl * (nq + entanglers);
    return per_block * n_sites;
}

BlockCircuit::BlockCircuit(const BlockSpec& spec, std::span<const double> params)
    : spec_(spec), params_(params.begin(), params.end()), gates_(block_layout(spec)) {
    require(params.size() == parameter_count(spec),
            "block " + to_string(spec) + " expects " + std::to_string(parameter_count(spec)) +
                " parameters, got " + std::to_string(params.size()));
    gate_of_param_.resize(params_.size());
    for (std::size_t g = 0; g < gates_.size(); ++g)
        for (std::size_t k = 0; k < gates_[g].param_count(); ++k)
            gate_of_param_[gates_[g].param_offset + k] = g;

    const auto dim = static_cast<Eigen::Index>(spec.dim());
    const auto bond = static_cast<Eigen::Index>(spec.bond_dim());
    std::vector<Eigen::MatrixXcd> locals;
    locals.reserve(gates_.size());
    for (const auto& gate : gates_)
        locals.push_back(gate_matrix(
            gate.kind, std::span<const double>(params_).subspan(gate.param_offset, gate.param_count())));

    prefix_.resize(gates_.size() + 1);
    prefix_[0] = Eigen::MatrixXcd::Identity(dim, bond);
    for (std::size_t g = 0; g < gates_.size(); ++g) {
        prefix_[g + 1] = prefix_[g];
        apply_gate(locals[g], gates_[g], spec.n_qubits, prefix_[g + 1]);
    }

    // suffix_[g] = G_last ... G_{g+1}
    suffix_.resize(gates_.size());
    if (!gates_.empty()) {
        suffix_.back() = Eigen::MatrixXcd::Identity(dim, dim);
        for (std::size_t g = gates_.size() - 1; g > 0; --g) {
            Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(dim, dim);
            apply_gate(locals[g], gates_[g], spec.n_qubits, full);
            suffix_[g - 1] = suffix_[g] * full;
        }
    }
}

Eigen::MatrixXcd BlockCircuit::isometry_with(std::size_t index, double value) const {
    require(index < params_.size(), "parameter index out of range");
    const std::size_t g = gate_of_param_[index];
    const auto& gate = gates_[g];
    std::vector<double> local_params(params_.begin() + static_cast<std::ptrdiff_t>(gate.param_offset),
                                     params_.begin() + static_cast<std::ptrdiff_t>(gate.param_offset +
                                                                                   gate.param_count()));
    local_params[index - gate.param_offset] = value;
    Eigen::MatrixXcd tmp = prefix_[g];
    apply_gate(gate_matrix(gate.kind, local_params), gate, spec_.n_qubits, tmp);
    return suffix_[g] * tmp;
}

} // namespace qcmps
