#pragma once

#include "qcmps/circuit_blocks.hpp"
#include "qcmps/pauli.hpp"
#include "qcmps/qcmps_state.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace qcmps {

enum class GradientMode { central_fd, blockwise_env };

std::string to_string(GradientMode mode);
GradientMode parse_gradient_mode(std::string_view text);

struct PenaltySpec {
    double mu_n = 1.0;
    double mu_s = 1.0;
    int target_n_elec = 0;
    /// Total spin quantum number s; the S^2 target is s(s+1).
    double target_s = 0.0;
};

struct ObjectiveComponents {
    double objective = 0.0;
    double energy = 0.0;
    double n_penalty = 0.0; // <(N - N_e)^2>
    double s_penalty = 0.0; // <(S^2 - s(s+1))^2>
    double n_expect = 0.0;
    double s2_expect = 0.0;
};

/// f = <H> + mu_N <(N - N_e)^2> + mu_S <(S^2 - s(s+1))^2>, with every
/// observable merged into one list of distinct Pauli strings so a single
/// contraction pass yields all components.
class CompiledObjective {
public:
    CompiledObjective(const AnsatzSpec& ansatz, const PauliPolynomial& hamiltonian,
                      const PauliPolynomial& number_op, const PauliPolynomial& s2_op,
                      const PenaltySpec& penalties, BoundaryMode mode = BoundaryMode::trace);

    const AnsatzSpec& ansatz() const { return ansatz_; }
    BoundaryMode boundary() const { return mode_; }
    std::size_t n_strings() const { return strings_.size(); }

    ObjectiveComponents evaluate(std::span<const double> params) const;
    ObjectiveComponents evaluate(const QcmpsState& state) const;
    double value(std::span<const double> params) const;

    Eigen::VectorXd gradient(std::span<const double> params, GradientMode mode, double step) const;

private:
    enum Column { kObjective, kEnergy, kNPenalty, kSPenalty, kNumber, kSpin2, kNorm, kColumns };

    Eigen::VectorXd gradient_central(std::span<const double> params, double step) const;
    Eigen::VectorXd gradient_blockwise(std::span<const double> params, double step) const;

    AnsatzSpec ansatz_;
    BoundaryMode mode_;
    std::vector<PauliString> strings_;
    Eigen::MatrixXcd coeffs_; // n_strings x kColumns
};

} // namespace qcmps
