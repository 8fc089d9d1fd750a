#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "support.hpp"
#include "vhrd/commands.hpp"
#include "vhrd/errors.hpp"
#include "vhrd/scenario.hpp"

using namespace vhrd;
namespace fs = std::filesystem;

namespace {

const char* kPdeScenario = R"({
  "schema": 1,
  "grid": {"dim": 1, "nx": 41, "length": 1.0},
  "coefficients": {"delta1": 1.0, "delta2": 1.0, "lambda": 1.0, "beta": 1.0,
                   "sigma1": 1.0, "sigma2": 0.5, "mu": 1.0, "h_u": 4.0},
  "initial": {"h_i": 0.5, "v_u": 0.8, "v_i": 0.2}
})";

fs::path workdir() {
    static fs::path base = [] {
        fs::path p = fs::temp_directory_path() / ("vhrd_tests_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return base;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    REQUIRE(out.good());
}

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult run_cli(const std::string& args, const std::string& env = "") {
    fs::path dir = workdir();
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(VHRD_CLI_PATH) + " " + args +
                      " >" + (dir / "stdout.txt").string() + " 2>" + (dir / "stderr.txt").string();
    int raw = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

} // namespace

TEST_CASE("scenario defaults and round trip") {
    Scenario s = parse_scenario(kPdeScenario);
    CHECK(s.schema == 1);
    CHECK(s.has_pde);
    REQUIRE(s.grid.has_value());
    CHECK(s.grid->nx == 41);
    CHECK(s.solver.linear_tol == 1e-11);
    CHECK(s.solver.eigen_tol == 1e-9);
    CHECK(s.solver.equilibrium_tol == 1e-8);
    CHECK(s.solver.dt == 0.0);
    CHECK(s.solver.horizon == 200.0);
    CHECK(s.solver.settle_tol == 1e-8);
    CHECK(s.solver.sample_dt == 0.25);
    CHECK(s.solver.snapshot_times.empty());
    CHECK_FALSE(s.sweep.has_value());
    CHECK_FALSE(s.ode.has_value());

    std::string once = serialize_scenario(s);
    std::string twice = serialize_scenario(parse_scenario(once));
    CHECK(once == twice);
}

TEST_CASE("scenario parse errors name the offending field") {
    CHECK_THROWS_WITH_AS(parse_scenario("{\"schema\": 2, \"ode\": {}}"),
                         doctest::Contains("schema"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario("not json"), doctest::Contains("JSON"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_scenario("{\"schema\": 1}"), doctest::Contains("grid"),
                         ConfigError);

    std::string no_initial = R"({"grid": {"dim": 1, "nx": 5, "length": 1},
      "coefficients": {"delta1": 1, "delta2": 1, "lambda": 1, "beta": 1,
                       "sigma1": 1, "sigma2": 1, "mu": 1, "h_u": 1}})";
    CHECK_THROWS_WITH_AS(parse_scenario(no_initial), doctest::Contains("initial"), ConfigError);

    Scenario bad_mu = parse_scenario(kPdeScenario);
    bad_mu.coefficients[6] = ConstantProfile{-1.0};
    CHECK_THROWS_WITH_AS(build_coefficients(bad_mu), doctest::Contains("mu"), ConfigError);

    std::string bad_sweep = std::string(kPdeScenario);
    bad_sweep.insert(bad_sweep.rfind('}'), ", \"sweep\": {\"parameter\": \"bogus\", \"values\": [1]}");
    CHECK_THROWS_WITH_AS(parse_scenario(bad_sweep), doctest::Contains("bogus"), ConfigError);

    std::string empty_sweep = std::string(kPdeScenario);
    empty_sweep.insert(empty_sweep.rfind('}'), ", \"sweep\": {\"parameter\": \"delta\", \"values\": []}");
    CHECK_THROWS_WITH_AS(parse_scenario(empty_sweep), doctest::Contains("values"), ConfigError);

    CHECK_THROWS_WITH_AS(
        parse_scenario(R"({"ode": {"params": {"lambda": 1, "sigma1": 1, "sigma2": 1,
                           "beta": 1, "mu": 1, "h_u": 1},
                           "initial": {"h_i": -0.5, "v_u": 1, "v_i": 0}}})"),
        doctest::Contains("initial"), ConfigError);

    CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("sweep substitution semantics") {
    Scenario s = parse_scenario(kPdeScenario);
    s.coefficients[1] = RampProfile{1.0, 2.0}; // delta2
    s.coefficients[4] = RampProfile{1.0, 3.0}; // sigma1

    ModelCoefficients swept = build_swept_coefficients(s, "delta", 5.0);
    CHECK(field_min(swept.delta1) == 5.0);
    CHECK(field_max(swept.delta1) == 5.0);
    CHECK(field_min(swept.delta2) == 5.0);
    CHECK(field_max(swept.delta2) == 5.0);

    ModelCoefficients one = build_swept_coefficients(s, "delta2", 0.25);
    CHECK(field_max(one.delta1) == 1.0);
    CHECK(field_max(one.delta2) == 0.25);

    ModelCoefficients scaled = build_swept_coefficients(s, "sigma1", 2.0);
    Field base = field_from_profile(*s.grid, s.coefficients[4]);
    for (int i = 0; i < base.size(); ++i)
        CHECK(scaled.sigma1[i] == doctest::Approx(2.0 * base[i]).epsilon(1e-15));
    CHECK(field_max(scaled.delta2) == doctest::Approx(2.0)); // untouched
}

TEST_CASE("csv cells survive a parse round trip") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        double x = std::ldexp(u(rng), k - 25);
        double back = std::strtod(format_g17(x).c_str(), nullptr);
        CHECK(back == x);
    }
}

TEST_CASE("command bodies create nested output directories") {
    Scenario s = parse_scenario(kPdeScenario);
    fs::path dir = workdir() / "nested" / "deeper";
    cmd_equilibria(s, dir.string());
    std::string csv = slurp(dir / "equilibria.csv");
    CHECK(first_line(csv) == "x,vhat,h_i,v_u,v_i");
    std::size_t tag = csv.find("# r0,");
    REQUIRE(tag != std::string::npos);
    CHECK(std::strtod(csv.c_str() + tag + 5, nullptr) == doctest::Approx(2.0).epsilon(1e-8));
    // header plus one row per node plus footer
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 41 + 1);

    cmd_verify(s, dir.string());
    std::string verify = slurp(dir / "verify.csv");
    CHECK(first_line(verify) == "check,residual");
    CHECK(verify.find("# status,ok") != std::string::npos);
}

TEST_CASE("cli computes the reference reproduction number") {
    fs::path cfg = workdir() / "ref.json";
    spit(cfg, kPdeScenario);
    fs::path out = workdir() / "out_r0";
    CliResult r = run_cli("r0 --config " + cfg.string() + " --out " + out.string());
    CHECK(r.code == 0);

    std::string csv = slurp(out / "r0.csv");
    CHECK(first_line(csv) ==
          "r0_direct,r0_factored,kappa0,local_min,local_max,limit_small,limit_large");
    std::string row = csv.substr(csv.find('\n') + 1);
    double r0 = std::strtod(row.c_str(), nullptr);
    CHECK(r0 == doctest::Approx(2.0).epsilon(1e-9));
    // kappa0 column sits third and must be positive here
    std::size_t pos = row.find(',');
    pos = row.find(',', pos + 1);
    CHECK(std::strtod(row.c_str() + pos + 1, nullptr) > 0.0);
}

TEST_CASE("cli exit codes") {
    fs::path bad = workdir() / "bad.json";
    std::string text = kPdeScenario;
    std::size_t at = text.find("\"mu\": 1.0");
    text.replace(at, 9, "\"mu\": -1.0");
    spit(bad, text);
    CliResult r2 = run_cli("r0 --config " + bad.string() + " --out " + (workdir() / "x").string());
    CHECK(r2.code == 2);
    CHECK(r2.err.find("mu") != std::string::npos);

    CliResult missing = run_cli("r0 --config /no/such/file.json --out " + (workdir() / "x").string());
    CHECK(missing.code == 2);

    // a fixed oversized dt makes the first step fail
    fs::path reject = workdir() / "reject.json";
    std::string rtext = kPdeScenario;
    rtext.insert(rtext.rfind('}'), ", \"solver\": {\"dt\": 5.0, \"horizon\": 10.0}");
    spit(reject, rtext);
    CliResult r3 =
        run_cli("simulate --config " + reject.string() + " --out " + (workdir() / "x3").string());
    CHECK(r3.code == 3);
    CHECK(r3.err.find("solver error") != std::string::npos);

    CliResult usage = run_cli("frobnicate --config x");
    CHECK(usage.code == 2);

    CliResult help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("cli simulate writes a deterministic trajectory with snapshots") {
    fs::path cfg = workdir() / "sim.json";
    std::string text = kPdeScenario;
    text.insert(text.rfind('}'),
                ", \"solver\": {\"horizon\": 80.0, \"snapshot_times\": [1.0, 2.5]}");
    spit(cfg, text);

    fs::path out1 = workdir() / "sim1";
    fs::path out2 = workdir() / "sim2";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out1.string()).code == 0);
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out2.string()).code == 0);

    std::string t1 = slurp(out1 / "trajectory.csv");
    CHECK(t1 == slurp(out2 / "trajectory.csv"));
    CHECK(first_line(t1) == "t,h_i_sup,v_u_sup,v_i_sup,v_total_err_sup,min_value");
    CHECK(t1.find("# verdict,E2") != std::string::npos);
    CHECK(t1.find("# settled,1") != std::string::npos);

    CHECK(fs::exists(out1 / "snapshot_000.csv"));
    CHECK(fs::exists(out1 / "snapshot_001.csv"));
    std::string snap = slurp(out1 / "snapshot_000.csv");
    CHECK(first_line(snap) == "x,h_i,v_u,v_i");
    CHECK(snap.find("# t,") != std::string::npos);
}

TEST_CASE("cli verdict footer below threshold") {
    fs::path cfg = workdir() / "sub.json";
    std::string text = kPdeScenario;
    std::size_t at = text.find("\"h_u\": 4.0");
    text.replace(at, 10, "\"h_u\": 1.0"); // r0 = 0.5
    text.insert(text.rfind('}'), ", \"solver\": {\"horizon\": 80.0}");
    spit(cfg, text);
    fs::path out = workdir() / "sub_out";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string()).code == 0);
    std::string csv = slurp(out / "trajectory.csv");
    CHECK(csv.find("# verdict,E1") != std::string::npos);
}

TEST_CASE("cli sweep is thread-invariant and flips the verdict once") {
    fs::path cfg = workdir() / "sweep.json";
    std::string text = kPdeScenario;
    text.insert(text.rfind('}'),
                R"(, "sweep": {"parameter": "sigma1", "values": [0.2, 0.4, 3.0, 4.0],
                    "simulate": true},
                   "solver": {"horizon": 250.0})");
    spit(cfg, text);

    fs::path out1 = workdir() / "sw1";
    fs::path out2 = workdir() / "sw2";
    CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out1.string(),
                  "VHRD_THREADS=1").code == 0);
    CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out2.string(),
                  "VHRD_THREADS=3").code == 0);
    std::string csv = slurp(out1 / "sweep.csv");
    CHECK(csv == slurp(out2 / "sweep.csv"));
    CHECK(first_line(csv) == "index,value,r0_direct,kappa0,limit_small,limit_large,verdict");

    int flips = 0;
    std::string prev;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line); // header
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::string verdict = line.substr(line.rfind(',') + 1);
        CHECK((verdict == "E1" || verdict == "E2"));
        if (!prev.empty() && verdict != prev) ++flips;
        prev = verdict;
    }
    CHECK(flips == 1);

    CliResult env_err = run_cli("sweep --config " + cfg.string() + " --out " +
                                (workdir() / "sw3").string(), "VHRD_THREADS=zero");
    CHECK(env_err.code == 2);
}

TEST_CASE("cli ode run reports the endemic verdict") {
    fs::path cfg = workdir() / "ode.json";
    spit(cfg, R"({
      "schema": 1,
      "ode": {"params": {"lambda": 1.0, "sigma1": 1.0, "sigma2": 0.5,
                         "beta": 1.0, "mu": 1.0, "h_u": 4.0},
              "initial": {"h_i": 1.0, "v_u": 0.7, "v_i": 0.3}}
    })");
    fs::path out = workdir() / "ode_out";
    CliResult r = run_cli("ode --config " + cfg.string() + " --out " + out.string());
    CHECK(r.code == 0);
    std::string csv = slurp(out / "ode.csv");
    CHECK(first_line(csv) == "t,h_i,v_u,v_i");
    CHECK(csv.find("# verdict,ss2") != std::string::npos);
    CHECK(csv.find("# r0,2") != std::string::npos);

    // the PDE commands refuse an ode-only scenario
    CliResult wrong = run_cli("r0 --config " + cfg.string() + " --out " + out.string());
    CHECK(wrong.code == 2);
}

TEST_CASE("cli equilibria then verify round trip") {
    fs::path cfg = workdir() / "eq.json";
    spit(cfg, kPdeScenario);
    fs::path out = workdir() / "eq_out";
    CHECK(run_cli("equilibria --config " + cfg.string() + " --out " + out.string()).code == 0);
    CHECK(run_cli("verify --config " + cfg.string() + " --out " + out.string()).code == 0);
    std::string v = slurp(out / "verify.csv");
    CHECK(v.find("# status,ok") != std::string::npos);
    CHECK(v.find("vhat_logistic,") != std::string::npos);
    CHECK(v.find("endemic_host,") != std::string::npos);

    // tampering with the stored vhat column must be caught
    std::string eq = slurp(out / "equilibria.csv");
    std::size_t row = eq.find('\n') + 1;
    std::size_t vhat_begin = eq.find(',', row) + 1;
    std::size_t vhat_end = eq.find(',', vhat_begin);
    eq.replace(vhat_begin, vhat_end - vhat_begin, "0.123");
    spit(out / "equilibria.csv", eq);
    CliResult bad = run_cli("verify --config " + cfg.string() + " --out " + out.string());
    CHECK(bad.code == 3);
}
