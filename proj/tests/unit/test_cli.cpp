#include "oracles.hpp"

#include "qcmps/exact.hpp"
#include "qcmps/fcidump.hpp"
#include "qcmps/fermion.hpp"
#include "qcmps_cli/cli.hpp"
#include "qcmps_cli/config.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <Eigen/QR>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace qcmps;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "qcmps");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch_dir() {
    const auto d = fs::temp_directory_path() / ("qcmps_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

std::string h2() { return oracle::fixture("h2_0.7414.fcidump"); }
std::string h4() { return oracle::fixture("h4_linear_2.0.fcidump"); }

} // namespace

TEST(Cli, InspectReportsSystem) {
    const auto r = run({"inspect", "--fcidump", h4()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = r.doc();
    EXPECT_EQ(d["system"]["n_orb"], 4);
    EXPECT_EQ(d["system"]["n_elec"], 4);
    EXPECT_EQ(d["system"]["n_sites"], 8);
    EXPECT_EQ(d["schema"], "qcmps-result/1");
    EXPECT_EQ(d["manifest"]["subcommand"], "inspect");
    ASSERT_EQ(d["manifest"]["inputs"].size(), 1u);
    EXPECT_EQ(d["manifest"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST(Cli, HfAndFciEnergies) {
    const auto ints = read_fcidump(h2()).integrals;
    const auto hf = run({"hf", "--fcidump", h2()});
    ASSERT_EQ(hf.code, 0) << hf.err;
    EXPECT_NEAR(hf.doc()["energy"].get<double>(), hf_energy(ints), 1e-12);

    const auto fci = run({"fci", "--fcidump", h2(), "--ordering", "blocked"});
    ASSERT_EQ(fci.code, 0) << fci.err;
    const double ref = oracle::sector_ground(oracle::fermion_hamiltonian(ints, false), ints.n_orb(), 2, 0, false).energy;
    EXPECT_NEAR(fci.doc()["energy"].get<double>(), ref, 1e-10);
}

TEST(Cli, MapTextAndJsonAgree) {
    const auto text = run({"map", "--fcidump", h2()});
    ASSERT_EQ(text.code, 0) << text.err;
    std::istringstream in(text.out);
    const auto poly = read_polynomial_text(in);
    const auto j = run({"map", "--fcidump", h2(), "--format", "json"});
    ASSERT_EQ(j.code, 0) << j.err;
    EXPECT_EQ(j.doc()["terms"].size(), poly.size());
    EXPECT_EQ(poly.size(), 15u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"nonsense"}).code, 1);
    EXPECT_EQ(run({"hf"}).code, 1);
    EXPECT_EQ(run({"hf", "--fcidump", "/nonexistent/x.fcidump"}).code, 1);
    EXPECT_EQ(run({"hf", "--fcidump", h2(), "--ordering", "zigzag"}).code, 1);
    EXPECT_EQ(run({"vqe", "--fcidump", h2(), "--block", "xx"}).code, 1);
    EXPECT_EQ(run({"rotate", "--fcidump", h2()}).code, 1);
    const auto help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_FALSE(help.out.empty());
}

TEST(Cli, UnknownConfigKeyIsRejected) {
    const auto dir = scratch_dir();
    const auto cfg = dir / "bad.toml";
    std::ofstream(cfg) << "[system]\nfcidump = \"" << h2() << "\"\n[ansatz]\nblok = \"au\"\n";
    const auto r = run({"hf", "--config", cfg.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("ansatz.blok"), std::string::npos) << r.err;
}

TEST(Cli, FlagsOverrideConfig) {
    const auto dir = scratch_dir();
    const auto cfg = dir / "vqe.toml";
    std::ofstream(cfg) << "# tiny run\n[system]\nfcidump = \"" << h2() << "\"\n"
                       << "[ansatz]\nblock = \"lu\"\nnq = 2\nnl = 1\n"
                       << "[optimizer]\nmax_iter = 3\nrestarts = 2\nseed = 11\n";
    const auto out = dir / "vqe.json";
    const auto r = run({"vqe", "--config", cfg.string(), "--restarts", "1", "--block", "au", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out);
    const auto d = json::parse(in);
    EXPECT_EQ(d["ansatz"]["block"], "AU");
    EXPECT_EQ(d["optimizer"]["restarts"], 1);
    EXPECT_EQ(d["optimizer"]["seed"], 11);
    EXPECT_EQ(d["optimizer"]["max_iter"], 3);
    EXPECT_EQ(d["result"]["restarts"].size(), 1u);
    EXPECT_TRUE(fs::exists(dir / "vqe.trace.csv"));
    const auto& outputs = d["manifest"]["outputs"];
    ASSERT_GE(outputs.size(), 2u);
    EXPECT_EQ(outputs[0], out.string());
    EXPECT_FALSE(d["manifest"]["config"].is_null());
}

TEST(Cli, VqeTraceHasHeaderAndRows) {
    const auto dir = scratch_dir();
    const auto trace = dir / "t.csv";
    const auto r = run({"vqe", "--fcidump", h2(), "--max-iter", "4", "--restarts", "1", "--trace", trace.string(),
                        "--reference", "fci"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(trace);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "restart,iteration,objective,energy,grad_norm,n_expect,s2_expect");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_GE(rows, 1u);
    EXPECT_LE(rows, 5u);
    EXPECT_FALSE(r.doc()["reference"].is_null());
}

TEST(Cli, EntropyFromFci) {
    const auto dir = scratch_dir();
    const auto csv = dir / "ipq.csv";
    const auto r = run({"entropy", "--fcidump", h2(), "--source", "fci", "--csv", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = r.doc();
    EXPECT_EQ(d["s1"].size(), 2u);
    EXPECT_EQ(d["units"], "nats");
    EXPECT_TRUE(fs::exists(csv));
    const auto hf = run({"entropy", "--fcidump", h2(), "--source", "hf"});
    ASSERT_EQ(hf.code, 0) << hf.err;
    for (const auto& s : hf.doc()["s1"]) EXPECT_NEAR(s.get<double>(), 0.0, 1e-12);
}

TEST(Cli, RotateRoundTripPreservesFci) {
    const auto dir = scratch_dir();
    const auto u = dir / "u.txt";
    const auto rotated = dir / "rot.fcidump";
    const auto ints = read_fcidump(h4()).integrals;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    const Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return gauss(rng); });
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ();
    {
        std::ofstream f(u);
        f.precision(17);
        f << q << "\n";
    }
    const auto r = run({"rotate", "--fcidump", h4(), "--u", u.string(), "--out", rotated.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto before = run({"fci", "--fcidump", h4()});
    const auto after = run({"fci", "--fcidump", rotated.string()});
    ASSERT_EQ(before.code, 0);
    ASSERT_EQ(after.code, 0) << after.err;
    EXPECT_NEAR(before.doc()["energy"].get<double>(), after.doc()["energy"].get<double>(), 1e-9);
    EXPECT_NE(hf_energy(read_fcidump(rotated.string()).integrals), hf_energy(ints));
}

TEST(Cli, RotateRejectsBothOrNeither) {
    const auto r = run({"rotate", "--fcidump", h2(), "--kappa", "a", "--u", "b"});
    EXPECT_EQ(r.code, 1);
}

TEST(Config, ParsesSubset) {
    std::istringstream in("# c\n[a]\ns = \"x # y\"\ni = 3\nf = 2.5e-1\nb = true\n\n[b]\nn = -4 # trailing\n");
    const auto c = cli::ConfigFile::parse(in);
    EXPECT_EQ(c.get_string("a", "s"), "x # y");
    EXPECT_EQ(c.get_int("a", "i"), 3);
    EXPECT_EQ(c.get_double("a", "f"), 0.25);
    EXPECT_EQ(c.get_double("a", "i"), 3.0);
    EXPECT_EQ(c.get_bool("a", "b"), true);
    EXPECT_EQ(c.get_int("b", "n"), -4);
    EXPECT_FALSE(c.has("b", "s"));
    EXPECT_THROW(c.get_int("a", "s"), cli::ConfigError);
}

TEST(Config, MalformedInputThrows) {
    for (const char* bad : {"[a\nx = 1\n", "[a]\nx 1\n", "[a]\nx = \"open\n", "[a]\nx = 1\nx = 2\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(cli::ConfigFile::parse(in), cli::ConfigError) << bad;
    }
}
