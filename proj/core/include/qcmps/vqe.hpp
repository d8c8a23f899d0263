#pragma once

#include "qcmps/bfgs.hpp"
#include "qcmps/circuit_blocks.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/objective.hpp"
#include "qcmps/pauli.hpp"
#include "qcmps/qcmps_state.hpp"
#include "qcmps/sites.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qcmps {

inline constexpr double kKcalPerHartree = 627.509474;

/// Penalties below this count as satisfied when picking the best restart.
inline constexpr double kPenaltyScreen = 1e-4;

struct VqeConfig {
    AnsatzSpec ansatz;
    PenaltySpec penalties;
    double grad_step = 1e-4;
    GradientMode grad_mode = GradientMode::blockwise_env;
    std::size_t max_iter = 500;
    double grad_tol = 1e-5;
    double energy_tol = 1e-10;
    std::size_t restarts = 3;
    std::uint64_t rng_seed = 0;
    double init_scale = std::numbers::pi;
    BoundaryMode boundary = BoundaryMode::trace;
    SiteOrdering ordering = SiteOrdering::interleaved;
    /// Optional reference energy (e.g. FCI) for the kcal/mol error.
    std::optional<double> reference_energy;

    void validate() const;
};

/// Qubit Hamiltonian plus the symmetry operators of the penalty terms.
struct VqeProblem {
    PauliPolynomial hamiltonian;
    PauliPolynomial number_op;
    PauliPolynomial s2_op;
    SiteOrdering ordering = SiteOrdering::interleaved;

    static VqeProblem from_integrals(const MolecularIntegrals& ints,
                                     SiteOrdering ordering = SiteOrdering::interleaved);
};

struct TraceRow {
    std::size_t iteration = 0;
    double objective = 0.0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double n_expect = 0.0;
    double s2_expect = 0.0;
};

struct RestartRecord {
    std::uint64_t seed = 0;
    std::vector<double> params;
    ObjectiveComponents components;
    std::vector<TraceRow> trace;
    BfgsStop stop = BfgsStop::max_iter;
    std::size_t evaluations = 0;
    bool satisfies_penalties = false;
};

struct VqeResult {
    double energy = 0.0;    // penalty-free
    double objective = 0.0; // penalized
    std::vector<double> params;
    ObjectiveComponents components;
    std::size_t best_restart = 0;
    /// Set when no restart met the penalty screen; the result is then the
    /// lowest-energy restart regardless of constraints.
    bool constraint_violating = false;
    std::optional<double> error_kcal;
    std::vector<RestartRecord> restarts;
    VqeConfig config;
};

/// Uniform draws in [-scale, scale] from a 64-bit Mersenne Twister seeded with `seed`.
std::vector<double> initial_parameters(std::size_t count, std::uint64_t seed, double scale);

VqeResult optimize(const VqeConfig& config, const VqeProblem& problem);

struct LayerSelection {
    std::size_t chosen = 0;
    std::vector<double> energies; // energies[l - 1] = E(N_l = l)
    /// True when no consecutive pair met the threshold and max_layers was returned.
    bool saturation_warning = false;
    std::vector<VqeResult> runs;
};

inline constexpr double kLayerThreshold = 2.0e-5;

/// Smallest N_l >= 2 with |E(N_l) - E(N_l - 1)| < threshold, evaluating
/// energies lazily in increasing N_l; max_layers (with a warning) otherwise.
LayerSelection select_layer_count(const std::function<double(std::size_t)>& energy_at,
                                  std::size_t max_layers, double threshold = kLayerThreshold);

/// Same rule with E(N_l) the best-restart energy of optimize() at N_l layers.
LayerSelection select_layer_count(const VqeConfig& config_template, const VqeProblem& problem,
                                  std::size_t max_layers, double threshold = kLayerThreshold);

} // namespace qcmps
