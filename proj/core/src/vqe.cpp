#include "qcmps/vqe.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/parallel.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace qcmps {

void VqeConfig::validate() const {
    ansatz.block.validate();
    require(ansatz.n_sites >= 1, "ansatz needs at least one site");
    require(penalties.mu_n >= 0.0 && penalties.mu_s >= 0.0, "penalty weights must be non-negative");
    require(penalties.target_s >= 0.0, "target spin must be non-negative");
    require(grad_step > 0.0, "grad_step must be positive");
    require(restarts >= 1, "restarts must be at least 1");
    require(init_scale >= 0.0, "init_scale must be non-negative");
    require(grad_tol >= 0.0 && energy_tol >= 0.0, "tolerances must be non-negative");
}

VqeProblem VqeProblem::from_integrals(const MolecularIntegrals& ints, SiteOrdering ordering) {
    return {build_qubit_hamiltonian(ints, ordering), build_number_operator(2 * ints.n_orb()),
            build_s2_operator(ints.n_orb(), ordering), ordering};
}

std::vector<double> initial_parameters(std::size_t count, std::uint64_t seed, double scale) {
    std::mt19937_64 gen(seed);
    std::vector<double> params(count);
    for (auto& p : params) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        p = scale * (2.0 * u - 1.0);
    }
    return params;
}

namespace {

RestartRecord run_restart(const VqeConfig& cfg, const CompiledObjective& objective, std::uint64_t seed) {
    RestartRecord rec;
    rec.seed = seed;
    const auto x0 = initial_parameters(cfg.ansatz.total_parameters(), seed, cfg.init_scale);

    ObjectiveFunction f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        const std::span<const double> p(x.data(), static_cast<std::size_t>(x.size()));
        if (grad)
            *grad = objective.gradient(p, cfg.grad_mode, cfg.grad_step);
        return objective.value(p);
    };
    IterateCallback on_iterate = [&](const BfgsIterate& it, const Eigen::VectorXd& x) {
        const auto c = objective.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        rec.trace.push_back({it.iteration, c.objective, c.energy, it.grad_norm, c.n_expect, c.s2_expect});
    };

    BfgsOptions opt;
    opt.max_iter = cfg.max_iter;
    opt.grad_tol = cfg.grad_tol;
    opt.energy_tol = cfg.energy_tol;
    const auto result = minimize_bfgs(f, Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size())),
                                      opt, on_iterate);
    rec.params.assign(result.x.data(), result.x.data() + result.x.size());
    rec.components = objective.evaluate(rec.params);
    rec.stop = result.reason;
    rec.evaluations = result.evaluations;
    rec.satisfies_penalties =
        rec.components.n_penalty < kPenaltyScreen && rec.components.s_penalty < kPenaltyScreen;
    return rec;
}

} // namespace

VqeResult optimize(const VqeConfig& config, const VqeProblem& problem) {
    config.validate();
    const CompiledObjective objective(config.ansatz, problem.hamiltonian, problem.number_op, problem.s2_op,
                                      config.penalties, config.boundary);

    VqeResult out;
    out.config = config;
    out.restarts.resize(config.restarts);
    parallel_for(config.restarts, [&](std::size_t r) {
        out.restarts[r] = run_restart(config, objective, config.rng_seed + r);
    });

    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < out.restarts.size(); ++r)
        if (out.restarts[r].satisfies_penalties &&
            (!best || out.restarts[r].components.energy < out.restarts[*best].components.energy))
            best = r;
    if (!best) {
        out.constraint_violating = true;
        best = 0;
        for (std::size_t r = 1; r < out.restarts.size(); ++r)
            if (out.restarts[r].components.energy < out.restarts[*best].components.energy)
                best = r;
    }
    const auto& chosen = out.restarts[*best];
    out.best_restart = *best;
    out.params = chosen.params;
    out.components = chosen.components;
    out.energy = chosen.components.energy;
    out.objective = chosen.components.objective;
    if (config.reference_energy)
        out.error_kcal = (out.energy - *config.reference_energy) * kKcalPerHartree;
    return out;
}

LayerSelection select_layer_count(const std::function<double(std::size_t)>& energy_at, std::size_t max_layers,
                                  double threshold) {
    require(max_layers >= 1, "max_layers must be at least 1");
    LayerSelection sel;
    for (std::size_t nl = 1; nl <= max_layers; ++nl) {
        sel.energies.push_back(energy_at(nl));
        if (nl >= 2 && std::abs(sel.energies[nl - 1] - sel.energies[nl - 2]) < threshold) {
            sel.chosen = nl;
            return sel;
        }
    }
    sel.chosen = max_layers;
    sel.saturation_warning = true;
    return sel;
}

LayerSelection select_layer_count(const VqeConfig& config_template, const VqeProblem& problem, std::size_t max_layers,
                                  double threshold) {
    std::vector<VqeResult> runs;
    auto energy_at = [&](std::size_t nl) {
        VqeConfig cfg = config_template;
        cfg.ansatz.block.n_layers = static_cast<int>(nl);
        runs.push_back(optimize(cfg, problem));
        return runs.back().energy;
    };
    LayerSelection sel = select_layer_count(energy_at, max_layers, threshold);
    sel.runs = std::move(runs);
    return sel;
}

} // namespace qcmps
