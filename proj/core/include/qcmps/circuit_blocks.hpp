#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcmps {

enum class BlockType { LU, AU, G2 };

std::string to_string(BlockType type);
BlockType parse_block_type(std::string_view text);

/// T-Nq(Nl): an Nq-qubit circuit block with Nl entangling layers. Qubit 0 is
/// the physical qubit; qubits 1..Nq-1 carry the bond.
struct BlockSpec {
    BlockType type = BlockType::AU;
    int n_qubits = 2;
    int n_layers = 1;

    void validate() const;
    std::size_t bond_dim() const { return std::size_t{1} << (n_qubits - 1); }
    std::size_t dim() const { return std::size_t{1} << n_qubits; }

    friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

std::string to_string(const BlockSpec& spec);

/// Variational parameters of one block:
///   LU: 3Nq + Nl (3(Nq-1) + 3Nq)
///   AU: 3Nq + Nl (3Nq(Nq-1) + 3Nq)
///   G2: Nl (4Nq + 16Nq(Nq-1))
std::size_t parameter_count(const BlockSpec& spec);

/// One block per spin-orbital site; block k owns the contiguous parameter
/// slice [k * per_block, (k+1) * per_block).
struct AnsatzSpec {
    BlockSpec block;
    std::size_t n_sites = 0;

    std::size_t parameters_per_block() const { return parameter_count(block); }
    std::size_t total_parameters() const { return n_sites * parameters_per_block(); }
    std::size_t slice_offset(std::size_t site) const { return site * parameters_per_block(); }
    std::span<const double> slice(std::span<const double> params, std::size_t site) const {
        return params.subspan(slice_offset(site), parameters_per_block());
    }
};

enum class GateKind {
    rotation3,   // U3(theta, phi, lambda)
    rotation4,   // e^{i alpha} U3(theta, phi, lambda)
    controlled3, // |0><0| x I + |1><1| x U3
    generic2     // exp(i sum_m theta_m sigma_a sigma_b)
};

struct Gate {
    GateKind kind;
    int qubit;
    int target; // second qubit for two-qubit gates, -1 otherwise
    std::size_t param_offset;

    std::size_t param_count() const;
};

/// Gates of a block in application order, each with its parameter offset.
std::vector<Gate> block_layout(const BlockSpec& spec);

/// Local matrix of a gate: 2x2 for single-qubit gates, 4x4 for two-qubit gates
/// in the basis |q_first q_second> with the first qubit most significant.
Eigen::MatrixXcd gate_matrix(GateKind kind, std::span<const double> params);

/// Left-multiplies rows of m (a 2^Nq-row matrix) by the gate acting on its qubits.
void apply_gate(const Eigen::MatrixXcd& local, const Gate& gate, int n_qubits,
                Eigen::MatrixXcd& m);

/// Full 2^Nq x 2^Nq unitary of the block; qubit 0 is the most significant bit.
Eigen::MatrixXcd build_block_unitary(const BlockSpec& spec, std::span<const double> params);

/// Elementary one- and two-qubit gates: single-qubit rotations and controlled
/// rotations count 1, each generic two-qubit unitary counts 19.
std::uint64_t estimate_elementary_gates(const BlockSpec& spec, std::size_t n_sites);

/// Caches gate prefix/suffix products of one block so the unitary with one
/// parameter changed costs two small products instead of a full rebuild.
/// Only the physical-|0> columns (the ones that define the site tensor) are kept.
class BlockCircuit {
public:
    BlockCircuit(const BlockSpec& spec, std::span<const double> params);

    const BlockSpec& spec() const { return spec_; }
    /// Columns [0, D) of the block unitary.
    const Eigen::MatrixXcd& isometry() const { return prefix_.back(); }
    /// Columns [0, D) of the unitary with params[index] replaced by value.
    Eigen::MatrixXcd isometry_with(std::size_t index, double value) const;

private:
    BlockSpec spec_;
    std::vector<double> params_;
    std::vector<Gate> gates_;
    std::vector<std::size_t> gate_of_param_;
    std::vector<Eigen::MatrixXcd> prefix_; // prefix_[g] = G_{g-1}..G_0 restricted to D columns
    std::vector<Eigen::MatrixXcd> suffix_; // suffix_[g] = G_{last}..G_{g+1}
};

} // namespace qcmps
