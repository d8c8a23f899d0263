#include "qcmps/exact.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/objective.hpp"
#include "qcmps/vqe.hpp"

#include <benchmark/benchmark.h>

#include <string>

using namespace qcmps;

namespace {

const MolecularIntegrals& h4() {
    static const auto ints = read_fcidump(std::string(QCMPS_FIXTURE_DIR) + "/h4_linear_2.0.fcidump").integrals;
    return ints;
}

const VqeProblem& h4_problem() {
    static const auto p = VqeProblem::from_integrals(h4());
    return p;
}

BlockType block_of(int64_t i) { return static_cast<BlockType>(i); }

} // namespace

static void BM_HamiltonianBuild(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_qubit_hamiltonian(h4()));
}
BENCHMARK(BM_HamiltonianBuild)->Unit(benchmark::kMillisecond);

// args: block type, n_qubits
static void BM_Expectation(benchmark::State& state) {
    const AnsatzSpec a{{block_of(state.range(0)), static_cast<int>(state.range(1)), 1}, 8};
    const auto p = initial_parameters(a.total_parameters(), 1, 1.0);
    const auto st = QcmpsState::from_parameters(a, p);
    for (auto _ : state) benchmark::DoNotOptimize(expectation(st, h4_problem().hamiltonian));
    state.SetLabel(to_string(a.block));
}
BENCHMARK(BM_Expectation)->Args({1, 2})->Args({1, 4})->Args({0, 4})->Args({2, 4})->Unit(benchmark::kMillisecond);

static void BM_ObjectiveValue(benchmark::State& state) {
    const AnsatzSpec a{{BlockType::AU, static_cast<int>(state.range(0)), 1}, 8};
    const auto& pr = h4_problem();
    const CompiledObjective obj(a, pr.hamiltonian, pr.number_op, pr.s2_op, {1.0, 1.0, 4, 0.0});
    const auto p = initial_parameters(a.total_parameters(), 2, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(obj.value(p));
}
BENCHMARK(BM_ObjectiveValue)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

// args: n_qubits, gradient mode (0 central, 1 blockwise)
static void BM_Gradient(benchmark::State& state) {
    const AnsatzSpec a{{BlockType::AU, static_cast<int>(state.range(0)), 1}, 8};
    const auto& pr = h4_problem();
    const CompiledObjective obj(a, pr.hamiltonian, pr.number_op, pr.s2_op, {1.0, 1.0, 4, 0.0});
    const auto p = initial_parameters(a.total_parameters(), 3, 1.0);
    const auto mode = state.range(1) ? GradientMode::blockwise_env : GradientMode::central_fd;
    for (auto _ : state) benchmark::DoNotOptimize(obj.gradient(p, mode, 1e-4));
    state.SetLabel(to_string(mode));
}
BENCHMARK(BM_Gradient)->Args({2, 0})->Args({2, 1})->Args({4, 1})->Unit(benchmark::kMillisecond);

static void BM_LanczosFci(benchmark::State& state) {
    const std::string name = state.range(0) == 4 ? "/h4_linear_2.0.fcidump" : "/h6_rect_2.0.fcidump";
    const auto ints = read_fcidump(std::string(QCMPS_FIXTURE_DIR) + name).integrals;
    const auto h = build_qubit_hamiltonian(ints);
    FciOptions opt;
    opt.method = EigenMethod::lanczos;
    for (auto _ : state) benchmark::DoNotOptimize(ground_state_fci(h, Sector{ints.n_elec(), ints.ms2()}, opt).energy);
}
BENCHMARK(BM_LanczosFci)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_SparseApply(benchmark::State& state) {
    const SparseOperator op(h4_problem().hamiltonian);
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(op.dimension())), y;
    for (auto _ : state) {
        op.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_SparseApply);
BENCHMARK_MAIN();
