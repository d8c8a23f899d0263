#include "qcmps_cli/cli.hpp"

#include "qcmps_cli/config.hpp"
#include "qcmps_cli/manifest.hpp"

#include "qcmps/errors.hpp"
#include "qcmps/exact.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps/orbital.hpp"
#include "qcmps/parallel.hpp"
#include "qcmps/vqe.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#ifndef QCMPS_VERSION
#define QCMPS_VERSION "0.0.0"
#endif

namespace qcmps::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Enum parsers report bad values as contract violations; on the command line
// they are usage errors.
template <class F>
auto as_usage(const std::string& what, F&& parse) {
    try {
        return parse();
    } catch (const ContractViolation& e) {
        throw UsageError(what + ": " + e.what());
    }
}

struct Flags {
    std::string config, fcidump, ordering, block, boundary, out, trace, csv, reference, source, kappa, u_file,
        format, grad_mode;
    int nq = 0, nl = 0, restarts = 0, threads = 0, max_layers = 0, max_iter = 0;
    long long seed = 0;
    double threshold = 0.0, init_scale = 0.0;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        const auto it = opts.find(name);
        return it != opts.end() && it->second && it->second->count() > 0;
    }
};

struct Settings {
    fs::path config_path;
    std::optional<fs::path> fcidump;
    SiteOrdering ordering = SiteOrdering::interleaved;
    VqeConfig vqe;
    std::optional<int> target_n_elec;
    std::optional<double> target_s;
    std::string reference = "none";
    unsigned threads = 0;
    std::optional<fs::path> out, trace, csv;
    std::size_t max_layers = 4;
    double threshold = kLayerThreshold;
    std::string source = "fci";
    std::optional<fs::path> kappa, u_file;
    std::string format = "text";
};

const std::set<std::string> kKnownKeys = {
    "system.fcidump",        "system.ordering",     "system.reference",      "ansatz.block",
    "ansatz.nq",             "ansatz.nl",           "ansatz.boundary",       "optimizer.grad_mode",
    "optimizer.grad_step",   "optimizer.max_iter",  "optimizer.grad_tol",    "optimizer.energy_tol",
    "optimizer.restarts",    "optimizer.seed",      "optimizer.init_scale",  "optimizer.threads",
    "penalties.mu_n",        "penalties.mu_s",      "penalties.target_n_elec", "penalties.target_s",
    "layers.max_layers",     "layers.threshold",    "entropy.source",        "output.out",
    "output.trace",          "output.csv"};

template <class T>
T non_negative(long long v, const std::string& key) {
    if (v < 0)
        throw ConfigError(key + " must be non-negative");
    return static_cast<T>(v);
}

void apply_config(const ConfigFile& cfg, Settings& s) {
    cfg.reject_unknown(kKnownKeys);
    if (auto v = cfg.get_path("system", "fcidump"))
        s.fcidump = *v;
    if (auto v = cfg.get_string("system", "ordering"))
        s.ordering = as_usage("system.ordering", [&] { return parse_site_ordering(*v); });
    if (cfg.has("system", "reference")) {
        try {
            s.reference = *cfg.get_string("system", "reference");
        } catch (const ConfigError&) {
            std::ostringstream num;
            num << std::setprecision(17) << *cfg.get_double("system", "reference");
            s.reference = num.str();
        }
    }
    if (auto v = cfg.get_string("ansatz", "block"))
        s.vqe.ansatz.block.type = as_usage("ansatz.block", [&] { return parse_block_type(*v); });
    if (auto v = cfg.get_int("ansatz", "nq"))
        s.vqe.ansatz.block.n_qubits = static_cast<int>(*v);
    if (auto v = cfg.get_int("ansatz", "nl"))
        s.vqe.ansatz.block.n_layers = static_cast<int>(*v);
    if (auto v = cfg.get_string("ansatz", "boundary"))
        s.vqe.boundary = as_usage("ansatz.boundary", [&] { return parse_boundary_mode(*v); });
    if (auto v = cfg.get_string("optimizer", "grad_mode"))
        s.vqe.grad_mode = as_usage("optimizer.grad_mode", [&] { return parse_gradient_mode(*v); });
    if (auto v = cfg.get_double("optimizer", "grad_step"))
        s.vqe.grad_step = *v;
    if (auto v = cfg.get_int("optimizer", "max_iter"))
        s.vqe.max_iter = non_negative<std::size_t>(*v, "optimizer.max_iter");
    if (auto v = cfg.get_double("optimizer", "grad_tol"))
        s.vqe.grad_tol = *v;
    if (auto v = cfg.get_double("optimizer", "energy_tol"))
        s.vqe.energy_tol = *v;
    if (auto v = cfg.get_int("optimizer", "restarts"))
        s.vqe.restarts = non_negative<std::size_t>(*v, "optimizer.restarts");
    if (auto v = cfg.get_int("optimizer", "seed"))
        s.vqe.rng_seed = non_negative<std::uint64_t>(*v, "optimizer.seed");
    if (auto v = cfg.get_double("optimizer", "init_scale"))
        s.vqe.init_scale = *v;
    if (auto v = cfg.get_int("optimizer", "threads"))
        s.threads = non_negative<unsigned>(*v, "optimizer.threads");
    if (auto v = cfg.get_double("penalties", "mu_n"))
        s.vqe.penalties.mu_n = *v;
    if (auto v = cfg.get_double("penalties", "mu_s"))
        s.vqe.penalties.mu_s = *v;
    if (auto v = cfg.get_int("penalties", "target_n_elec"))
        s.target_n_elec = static_cast<int>(*v);
    if (auto v = cfg.get_double("penalties", "target_s"))
        s.target_s = *v;
    if (auto v = cfg.get_int("layers", "max_layers"))
        s.max_layers = non_negative<std::size_t>(*v, "layers.max_layers");
    if (auto v = cfg.get_double("layers", "threshold"))
        s.threshold = *v;
    if (auto v = cfg.get_string("entropy", "source"))
        s.source = *v;
    if (auto v = cfg.get_path("output", "out"))
        s.out = *v;
    if (auto v = cfg.get_path("output", "trace"))
        s.trace = *v;
    if (auto v = cfg.get_path("output", "csv"))
        s.csv = *v;
}

void apply_flags(const Flags& f, Settings& s) {
    auto non_neg = [](long long v, const char* name) {
        if (v < 0)
            throw UsageError(std::string("--") + name + " must be non-negative");
        return v;
    };
    if (f.given("fcidump"))
        s.fcidump = f.fcidump;
    if (f.given("ordering"))
        s.ordering = as_usage("--ordering", [&] { return parse_site_ordering(f.ordering); });
    if (f.given("block"))
        s.vqe.ansatz.block.type = as_usage("--block", [&] { return parse_block_type(f.block); });
    if (f.given("nq"))
        s.vqe.ansatz.block.n_qubits = f.nq;
    if (f.given("nl"))
        s.vqe.ansatz.block.n_layers = f.nl;
    if (f.given("seed"))
        s.vqe.rng_seed = static_cast<std::uint64_t>(non_neg(f.seed, "seed"));
    if (f.given("restarts"))
        s.vqe.restarts = static_cast<std::size_t>(non_neg(f.restarts, "restarts"));
    if (f.given("threads"))
        s.threads = static_cast<unsigned>(non_neg(f.threads, "threads"));
    if (f.given("boundary"))
        s.vqe.boundary = as_usage("--boundary", [&] { return parse_boundary_mode(f.boundary); });
    if (f.given("grad-mode"))
        s.vqe.grad_mode = as_usage("--grad-mode", [&] { return parse_gradient_mode(f.grad_mode); });
    if (f.given("max-iter"))
        s.vqe.max_iter = static_cast<std::size_t>(non_neg(f.max_iter, "max-iter"));
    if (f.given("init-scale"))
        s.vqe.init_scale = f.init_scale;
    if (f.given("out"))
        s.out = f.out;
    if (f.given("trace"))
        s.trace = f.trace;
    if (f.given("csv"))
        s.csv = f.csv;
    if (f.given("reference"))
        s.reference = f.reference;
    if (f.given("max-layers"))
        s.max_layers = static_cast<std::size_t>(non_neg(f.max_layers, "max-layers"));
    if (f.given("threshold"))
        s.threshold = f.threshold;
    if (f.given("source"))
        s.source = f.source;
    if (f.given("kappa"))
        s.kappa = f.kappa;
    if (f.given("u"))
        s.u_file = f.u_file;
    if (f.given("format"))
        s.format = f.format;
}

void add_common_options(CLI::App* app, Flags& f) {
    f.opts["config"] = app->add_option("--config", f.config, "TOML-style configuration file");
    f.opts["fcidump"] = app->add_option("--fcidump", f.fcidump, "FCIDUMP integral file");
    f.opts["ordering"] = app->add_option("--ordering", f.ordering, "interleaved|blocked");
    f.opts["block"] = app->add_option("--block", f.block, "lu|au|g2");
    f.opts["nq"] = app->add_option("--nq", f.nq, "qubits per circuit block");
    f.opts["nl"] = app->add_option("--nl", f.nl, "layers per circuit block");
    f.opts["seed"] = app->add_option("--seed", f.seed, "base RNG seed");
    f.opts["restarts"] = app->add_option("--restarts", f.restarts, "optimizer restarts");
    f.opts["threads"] = app->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    f.opts["boundary"] = app->add_option("--boundary", f.boundary, "trace|project");
    f.opts["out"] = app->add_option("--out", f.out, "output file (default: standard output)");
}

struct Context {
    Settings settings;
    RunManifest manifest;
    std::ostream& out;
    std::ostream& err;
};

ParsedFcidump load_system(Context& ctx) {
    if (!ctx.settings.fcidump)
        throw UsageError("an FCIDUMP file is required (--fcidump or [system] fcidump)");
    auto parsed = read_fcidump(*ctx.settings.fcidump);
    ctx.manifest.add_input(*ctx.settings.fcidump);
    return parsed;
}

void finalize_vqe_config(Settings& s, const MolecularIntegrals& ints) {
    s.vqe.ordering = s.ordering;
    s.vqe.ansatz.n_sites = 2 * ints.n_orb();
    s.vqe.penalties.target_n_elec = s.target_n_elec.value_or(ints.n_elec());
    s.vqe.penalties.target_s = s.target_s.value_or(std::abs(ints.ms2()) / 2.0);
    as_usage("ansatz", [&] {
        s.vqe.validate();
        return 0;
    });
}

json reference_energy(Context& ctx, const VqeProblem& problem, const MolecularIntegrals& ints) {
    const std::string& ref = ctx.settings.reference;
    if (ref == "none")
        return nullptr;
    if (ref == "hf")
        return {{"kind", "hf"}, {"energy", hf_energy(ints, ctx.settings.ordering)}};
    if (ref == "fci") {
        const auto fci = ground_state_fci(problem.hamiltonian, Sector{ints.n_elec(), ints.ms2()}, {},
                                          ctx.settings.ordering);
        return {{"kind", "fci"}, {"energy", fci.energy}};
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(ref, &used);
        if (used == ref.size())
            return {{"kind", "value"}, {"energy", v}};
    } catch (const std::exception&) {
    }
    throw UsageError("reference must be none, hf, fci, or a number; got '" + ref + "'");
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
    fs::path p = base;
    p.replace_extension();
    return p.string() + suffix;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << std::setprecision(17);
    return f;
}

void emit_json(Context& ctx, json payload) {
    if (ctx.settings.out)
        ctx.manifest.outputs.insert(ctx.manifest.outputs.begin(), ctx.settings.out->string());
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["manifest"] = ctx.manifest.to_json();
    for (auto& [key, value] : payload.items())
        doc[key] = std::move(value);
    if (ctx.settings.out) {
        auto f = open_output(*ctx.settings.out);
        f << doc.dump(2) << '\n';
    } else {
        ctx.out << doc.dump(2) << '\n';
    }
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json system_json(const MolecularIntegrals& ints, SiteOrdering ordering) {
    return {{"n_orb", ints.n_orb()}, {"n_elec", ints.n_elec()}, {"ms2", ints.ms2()},
            {"n_sites", 2 * ints.n_orb()}, {"ordering", to_string(ordering)}};
}

json ansatz_json(const VqeConfig& cfg) {
    return {{"block", to_string(cfg.ansatz.block.type)},
            {"label", to_string(cfg.ansatz.block)},
            {"nq", cfg.ansatz.block.n_qubits},
            {"nl", cfg.ansatz.block.n_layers},
            {"bond_dim", cfg.ansatz.block.bond_dim()},
            {"n_sites", cfg.ansatz.n_sites},
            {"n_params", cfg.ansatz.total_parameters()},
            {"boundary", to_string(cfg.boundary)}};
}

json optimizer_json(const VqeConfig& cfg) {
    return {{"method", "bfgs"},
            {"grad_mode", to_string(cfg.grad_mode)},
            {"grad_step", cfg.grad_step},
            {"max_iter", cfg.max_iter},
            {"grad_tol", cfg.grad_tol},
            {"energy_tol", cfg.energy_tol},
            {"restarts", cfg.restarts},
            {"seed", cfg.rng_seed},
            {"init_scale", cfg.init_scale},
            {"penalties",
             {{"mu_n", cfg.penalties.mu_n},
              {"mu_s", cfg.penalties.mu_s},
              {"target_n_elec", cfg.penalties.target_n_elec},
              {"target_s", cfg.penalties.target_s}}}};
}

json result_json(const VqeResult& r) {
    json restarts = json::array();
    for (const auto& rec : r.restarts)
        restarts.push_back({{"seed", rec.seed},
                            {"energy", rec.components.energy},
                            {"objective", rec.components.objective},
                            {"n_expect", rec.components.n_expect},
                            {"s2_expect", rec.components.s2_expect},
                            {"satisfies_penalties", rec.satisfies_penalties},
                            {"iterations", rec.trace.empty() ? 0 : rec.trace.back().iteration},
                            {"evaluations", rec.evaluations},
                            {"stop", to_string(rec.stop)}});
    return {{"energy", r.energy},
            {"objective", r.objective},
            {"n_expect", r.components.n_expect},
            {"s2_expect", r.components.s2_expect},
            {"n_penalty", r.components.n_penalty},
            {"s_penalty", r.components.s_penalty},
            {"error_kcal", r.error_kcal ? json(*r.error_kcal) : json(nullptr)},
            {"constraint_violating", r.constraint_violating},
            {"best_restart", r.best_restart},
            {"params", r.params},
            {"restarts", restarts}};
}

void write_trace_csv(std::ostream& f, const VqeResult& r) {
    f << "restart,iteration,objective,energy,grad_norm,n_expect,s2_expect\n";
    for (std::size_t k = 0; k < r.restarts.size(); ++k)
        for (const auto& row : r.restarts[k].trace)
            f << k << ',' << row.iteration << ',' << row.objective << ',' << row.energy << ',' << row.grad_norm
              << ',' << row.n_expect << ',' << row.s2_expect << '\n';
}

int cmd_inspect(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    std::size_t h1_nonzero = 0;
    for (std::size_t p = 0; p < ints.n_orb(); ++p)
        for (std::size_t q = 0; q <= p; ++q)
            h1_nonzero += ints.h1(p, q) != 0.0;
    std::size_t g2_nonzero = 0;
    for (std::size_t k = 0; k < ints.packed_size(); ++k)
        g2_nonzero += ints.g2_packed(k) != 0.0;
    const auto h = build_qubit_hamiltonian(ints, ctx.settings.ordering);
    std::map<std::size_t, std::size_t> weights;
    for (const auto& t : h.terms())
        ++weights[t.string.weight()];
    json hist = json::object();
    for (const auto& [w, n] : weights)
        hist[std::to_string(w)] = n;
    emit_json(ctx, {{"system", system_json(ints, ctx.settings.ordering)},
                    {"e_core", ints.e_core()},
                    {"integrals", {{"h1_nonzero", h1_nonzero}, {"g2_nonzero_unique", g2_nonzero}}},
                    {"parse_report",
                     {{"records", parsed.report.records},
                      {"duplicates", parsed.report.duplicates},
                      {"conflicting_duplicates", parsed.report.conflicting_duplicates},
                      {"ignored", parsed.report.ignored}}},
                    {"qubit_hamiltonian",
                     {{"n_terms", h.size()},
                      {"identity_coefficient", h.identity_coefficient().real()},
                      {"screened_mass", h.screened_mass()},
                      {"weight_histogram", hist}}}});
    return 0;
}

int cmd_map(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto h = build_qubit_hamiltonian(parsed.integrals, ctx.settings.ordering);
    if (ctx.settings.format == "json") {
        json terms = json::array();
        for (const auto& t : h.terms())
            terms.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"string", to_string(t.string)}});
        emit_json(ctx, {{"system", system_json(parsed.integrals, ctx.settings.ordering)},
                        {"n_sites", h.n_sites()},
                        {"screened_mass", h.screened_mass()},
                        {"terms", terms}});
        return 0;
    }
    if (ctx.settings.format != "text")
        throw UsageError("--format must be text or json");
    if (ctx.settings.out) {
        auto f = open_output(*ctx.settings.out);
        write_polynomial_text(f, h);
    } else {
        write_polynomial_text(ctx.out, h);
    }
    return 0;
}

int cmd_hf(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    const auto occ = aufbau_occupied_sites(ints.n_orb(), ints.n_elec(), ints.ms2(), ctx.settings.ordering);
    emit_json(ctx, {{"system", system_json(ints, ctx.settings.ordering)},
                    {"energy", hf_energy(ints, ctx.settings.ordering)},
                    {"occupied_sites", occ}});
    return 0;
}

int cmd_fci(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    const auto h = build_qubit_hamiltonian(ints, ctx.settings.ordering);
    const auto fci = ground_state_fci(h, Sector{ints.n_elec(), ints.ms2()}, {}, ctx.settings.ordering);
    emit_json(ctx, {{"system", system_json(ints, ctx.settings.ordering)},
                    {"energy", fci.energy},
                    {"residual", fci.residual},
                    {"matvecs", fci.iterations},
                    {"method", fci.method == EigenMethod::dense ? "dense" : "lanczos"},
                    {"sector", {{"n_elec", ints.n_elec()}, {"ms2", ints.ms2()}}}});
    return 0;
}

int cmd_vqe(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    finalize_vqe_config(ctx.settings, ints);
    const auto problem = VqeProblem::from_integrals(ints, ctx.settings.ordering);
    const json ref = reference_energy(ctx, problem, ints);
    if (!ref.is_null())
        ctx.settings.vqe.reference_energy = ref["energy"].get<double>();
    const auto result = optimize(ctx.settings.vqe, problem);
    if (result.constraint_violating)
        ctx.err << "warning: no restart met the penalty screen; reporting the constraint-violating best\n";

    std::optional<fs::path> trace = ctx.settings.trace;
    if (!trace && ctx.settings.out)
        trace = sibling(*ctx.settings.out, ".trace.csv");
    if (trace) {
        auto f = open_output(*trace);
        write_trace_csv(f, result);
        ctx.manifest.outputs.push_back(trace->string());
    }
    emit_json(ctx, {{"system", system_json(ints, ctx.settings.ordering)},
                    {"ansatz", ansatz_json(result.config)},
                    {"optimizer", optimizer_json(result.config)},
                    {"reference", ref},
                    {"result", result_json(result)}});
    return 0;
}

int cmd_layers(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    finalize_vqe_config(ctx.settings, ints);
    if (ctx.settings.max_layers < 1)
        throw UsageError("max_layers must be at least 1");
    const auto problem = VqeProblem::from_integrals(ints, ctx.settings.ordering);
    const json ref = reference_energy(ctx, problem, ints);
    if (!ref.is_null())
        ctx.settings.vqe.reference_energy = ref["energy"].get<double>();
    const auto sel = select_layer_count(ctx.settings.vqe, problem, ctx.settings.max_layers, ctx.settings.threshold);
    if (sel.saturation_warning)
        ctx.err << "warning: energies did not saturate within " << ctx.settings.max_layers << " layers\n";
    json runs = json::array();
    for (std::size_t l = 0; l < sel.runs.size(); ++l)
        runs.push_back({{"nl", l + 1},
                        {"energy", sel.runs[l].energy},
                        {"error_kcal", sel.runs[l].error_kcal ? json(*sel.runs[l].error_kcal) : json(nullptr)},
                        {"constraint_violating", sel.runs[l].constraint_violating}});
    emit_json(ctx, {{"system", system_json(ints, ctx.settings.ordering)},
                    {"ansatz", ansatz_json(ctx.settings.vqe)},
                    {"optimizer", optimizer_json(ctx.settings.vqe)},
                    {"reference", ref},
                    {"threshold", ctx.settings.threshold},
                    {"chosen_nl", sel.chosen},
                    {"saturation_warning", sel.saturation_warning},
                    {"energies", sel.energies},
                    {"runs", runs}});
    return 0;
}

int cmd_entropy(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& ints = parsed.integrals;
    const auto ordering = ctx.settings.ordering;
    std::unique_ptr<StateSource> source;
    json source_info;
    if (ctx.settings.source == "fci") {
        const auto h = build_qubit_hamiltonian(ints, ordering);
        auto fci = ground_state_fci(h, Sector{ints.n_elec(), ints.ms2()}, {}, ordering);
        source_info = {{"kind", "fci"}, {"energy", fci.energy}};
        source = std::make_unique<StatevectorSource>(std::move(fci.vector), "fci");
    } else if (ctx.settings.source == "hf") {
        source_info = {{"kind", "hf"}};
        source = std::make_unique<QcmpsSource>(
            hartree_fock_state(2 * ints.n_orb(), ints.n_elec(), ordering, ints.ms2()), BoundaryMode::trace, "hf");
    } else if (ctx.settings.source == "vqe") {
        finalize_vqe_config(ctx.settings, ints);
        const auto problem = VqeProblem::from_integrals(ints, ordering);
        const auto result = optimize(ctx.settings.vqe, problem);
        source_info = {{"kind", "vqe"}, {"ansatz", ansatz_json(result.config)},
                       {"optimizer", optimizer_json(result.config)}, {"energy", result.energy}};
        source = std::make_unique<QcmpsSource>(QcmpsState::from_parameters(result.config.ansatz, result.params),
                                               result.config.boundary, "vqe " + to_string(result.config.ansatz.block));
    } else {
        throw UsageError("entropy source must be fci, hf, or vqe");
    }
    const auto report = interaction_matrix(*source, ordering);

    std::optional<fs::path> csv = ctx.settings.csv;
    if (!csv && ctx.settings.out)
        csv = sibling(*ctx.settings.out, ".ipq.csv");
    if (csv) {
        auto f = open_output(*csv);
        f << "p,q,i_pq\n";
        for (Eigen::Index p = 0; p < report.i_pq.rows(); ++p)
            for (Eigen::Index q = 0; q < report.i_pq.cols(); ++q)
                f << p << ',' << q << ',' << report.i_pq(p, q) << '\n';
        ctx.manifest.outputs.push_back(csv->string());
    }
    emit_json(ctx, {{"system", system_json(ints, ordering)},
                    {"source", source_info},
                    {"units", "nats"},
                    {"s1", std::vector<double>(report.s1.data(), report.s1.data() + report.s1.size())},
                    {"s2", matrix_json(report.s2)},
                    {"i_pq", matrix_json(report.i_pq)},
                    {"max_selection_rule_residual", report.max_selection_rule_residual}});
    return 0;
}

int cmd_rotate(Context& ctx) {
    const auto parsed = load_system(ctx);
    const auto& s = ctx.settings;
    if (s.kappa.has_value() == s.u_file.has_value())
        throw UsageError("rotate needs exactly one of --kappa or --u");
    Eigen::MatrixXd u;
    if (s.kappa) {
        u = exponentiate_kappa(read_matrix_file(*s.kappa));
        ctx.manifest.add_input(*s.kappa);
    } else {
        u = OrbitalRotation::from_matrix(read_matrix_file(*s.u_file)).u;
        ctx.manifest.add_input(*s.u_file);
    }
    const auto rotated = rotate_integrals(parsed.integrals, u);
    if (s.out)
        write_fcidump(*s.out, rotated);
    else
        write_fcidump(ctx.out, rotated);
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qcmps: quantum-circuit MPS variational eigensolver (classical simulation)", "qcmps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QCMPS_VERSION);

    Flags flags;
    struct Sub {
        const char* name;
        const char* help;
        int (*run)(Context&);
    };
    const Sub subs[] = {
        {"inspect", "Summarize an FCIDUMP file and its qubit Hamiltonian", cmd_inspect},
        {"map", "Emit the Jordan-Wigner qubit Hamiltonian", cmd_map},
        {"hf", "Hartree-Fock determinant energy", cmd_hf},
        {"fci", "Exact ground-state energy in the FCIDUMP's (N, MS2) sector", cmd_fci},
        {"vqe", "Optimize a QCMPS ansatz", cmd_vqe},
        {"layers", "Pick the layer count at which the energy saturates", cmd_layers},
        {"entropy", "Orbital entropies and interaction matrix", cmd_entropy},
        {"rotate", "Rotate the orbitals of an FCIDUMP file", cmd_rotate},
    };
    std::map<CLI::App*, const Sub*> handlers;
    for (const auto& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common_options(cmd, flags);
        const std::string name = sub.name;
        if (name == "vqe" || name == "layers" || name == "entropy") {
            flags.opts["grad-mode"] = cmd->add_option("--grad-mode", flags.grad_mode, "central_fd|blockwise_env");
            flags.opts["max-iter"] = cmd->add_option("--max-iter", flags.max_iter, "BFGS iteration budget");
            flags.opts["init-scale"] = cmd->add_option("--init-scale", flags.init_scale, "initial angle range");
        }
        if (name == "vqe" || name == "layers")
            flags.opts["reference"] = cmd->add_option("--reference", flags.reference, "none|hf|fci|<energy>");
        if (name == "vqe")
            flags.opts["trace"] = cmd->add_option("--trace", flags.trace, "convergence trace CSV");
        if (name == "layers") {
            flags.opts["max-layers"] = cmd->add_option("--max-layers", flags.max_layers, "largest N_l to try");
            flags.opts["threshold"] = cmd->add_option("--threshold", flags.threshold, "saturation threshold (Hartree)");
        }
        if (name == "entropy") {
            flags.opts["source"] = cmd->add_option("--source", flags.source, "fci|hf|vqe");
            flags.opts["csv"] = cmd->add_option("--csv", flags.csv, "I_pq CSV output");
        }
        if (name == "map")
            flags.opts["format"] = cmd->add_option("--format", flags.format, "text|json");
        if (name == "rotate") {
            flags.opts["kappa"] = cmd->add_option("--kappa", flags.kappa, "antisymmetric generator matrix file");
            flags.opts["u"] = cmd->add_option("--u", flags.u_file, "orthogonal rotation matrix file");
        }
        handlers[cmd] = &sub;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help, error;
        const int code = app.exit(e, help, error);
        out << help.str();
        err << error.str();
        return code == 0 ? 0 : 1;
    }

    CLI::App* chosen = app.get_subcommands().front();
    const Sub* sub = handlers.at(chosen);
    // Options shared by all subcommands are registered once per subcommand;
    // keep only the ones belonging to the chosen one.
    for (auto& [name, opt] : flags.opts) {
        CLI::Option* own = chosen->get_option_no_throw("--" + name);
        opt = own;
    }

    Context ctx{Settings{}, RunManifest{}, out, err};
    ctx.manifest.subcommand = sub->name;
    ctx.manifest.tool_version = QCMPS_VERSION;
    try {
        if (flags.given("config")) {
            ctx.settings.config_path = flags.config;
            const auto cfg = ConfigFile::load(flags.config);
            apply_config(cfg, ctx.settings);
            ctx.manifest.config_path = flags.config;
            ctx.manifest.add_input(flags.config);
        }
        apply_flags(flags, ctx.settings);
        set_num_threads(ctx.settings.threads);
        ctx.manifest.threads = num_threads();
        return sub->run(ctx);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const ContractViolation& e) {
        err << "contract violation: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace qcmps::cli
