#include "vhrd/commands.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vhrd/dynamics.hpp"
#include "vhrd/equilibria.hpp"
#include "vhrd/errors.hpp"
#include "vhrd/r0.hpp"

namespace vhrd {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_file(const std::string& out_dir, const std::string& name, const std::string& body) {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    out << body;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

void append_row(std::string& body, std::initializer_list<double> cells) {
    bool first = true;
    for (double c : cells) {
        if (!first) body += ',';
        body += format_g17(c);
        first = false;
    }
    body += '\n';
}

std::string coordinate_header(const Grid& g) { return g.dim == 2 ? "x,y" : "x"; }

void append_coordinates(std::string& body, const Grid& g, int idx) {
    body += format_g17(g.x(idx));
    if (g.dim == 2) {
        body += ',';
        body += format_g17(g.y(idx));
    }
}

int thread_budget(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    long n = hw == 0 ? 1 : static_cast<long>(hw);
    if (const char* env = std::getenv("VHRD_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("VHRD_THREADS must be a positive integer");
        n = v;
    }
    return static_cast<int>(std::max(1L, std::min(n, static_cast<long>(jobs))));
}

} // namespace

void cmd_r0(const Scenario& s, const std::string& out_dir) {
    ModelCoefficients c = build_coefficients(s);
    Field vhat = compute_vhat(c, 1e-10, s.solver.linear_tol);
    SpectralReport rep = spectral_report(c, vhat, s.solver.eigen_tol, s.solver.linear_tol);

    std::string body = "r0_direct,r0_factored,kappa0,local_min,local_max,limit_small,limit_large\n";
    append_row(body, {rep.r0_direct, rep.r0_factored, rep.kappa0, rep.local_r_min, rep.local_r_max,
                      rep.limit_small, rep.limit_large});
    write_file(out_dir, "r0.csv", body);
}

void cmd_equilibria(const Scenario& s, const std::string& out_dir) {
    ModelCoefficients c = build_coefficients(s);
    EquilibriumSet eq = enumerate_equilibria(c, s.solver.equilibrium_tol);
    const Grid& g = *s.grid;

    std::string body = coordinate_header(g) + ",vhat";
    if (eq.endemic) body += ",h_i,v_u,v_i";
    body += '\n';
    for (int i = 0; i < g.size(); ++i) {
        append_coordinates(body, g, i);
        body += ',';
        body += format_g17(eq.vhat[i]);
        if (eq.endemic) {
            body += ',';
            body += format_g17(eq.endemic->h_i[i]);
            body += ',';
            body += format_g17(eq.endemic->v_u[i]);
            body += ',';
            body += format_g17(eq.endemic->v_i[i]);
        }
        body += '\n';
    }
    body += "# r0," + format_g17(eq.r0) + "\n";
    write_file(out_dir, "equilibria.csv", body);
}

namespace {

RunOptions run_options_from(const SolverOptions& so) {
    RunOptions o;
    o.dt = so.dt;
    o.horizon = so.horizon;
    o.settle_tol = so.settle_tol;
    o.sample_dt = so.sample_dt;
    o.snapshot_times = so.snapshot_times;
    o.linear_tol = so.linear_tol;
    return o;
}

} // namespace

void cmd_simulate(const Scenario& s, const std::string& out_dir) {
    ModelCoefficients c = build_coefficients(s);
    auto init = build_initial_fields(s);
    SimState state{init[0], init[1], init[2], 0.0};
    RunResult res = run_until_steady(state, c, run_options_from(s.solver));

    std::string body = "t,h_i_sup,v_u_sup,v_i_sup,v_total_err_sup,min_value\n";
    const TrajectoryRecord& r = res.record;
    for (std::size_t i = 0; i < r.t.size(); ++i)
        append_row(body, {r.t[i], r.h_i_sup[i], r.v_u_sup[i], r.v_i_sup[i], r.v_total_err_sup[i],
                          r.min_value[i]});
    body += "# r0," + format_g17(res.r0) + "\n";
    body += std::string("# settled,") + (res.settled ? "1" : "0") + "\n";
    body += "# settle_time," + format_g17(res.settle_time) + "\n";
    body += "# verdict," + verdict_name(res.verdict) + "\n";
    write_file(out_dir, "trajectory.csv", body);

    const Grid& g = *s.grid;
    for (std::size_t k = 0; k < res.snapshots.size(); ++k) {
        std::string snap = coordinate_header(g) + ",h_i,v_u,v_i\n";
        const SimState& st = res.snapshots[k];
        for (int i = 0; i < g.size(); ++i) {
            append_coordinates(snap, g, i);
            snap += ',';
            snap += format_g17(st.h_i[i]);
            snap += ',';
            snap += format_g17(st.v_u[i]);
            snap += ',';
            snap += format_g17(st.v_i[i]);
            snap += '\n';
        }
        snap += "# t," + format_g17(st.t) + "\n";
        char name[32];
        std::snprintf(name, sizeof(name), "snapshot_%03zu.csv", k);
        write_file(out_dir, name, snap);
    }
}

void cmd_sweep(const Scenario& s, const std::string& out_dir) {
    if (!s.sweep) throw ConfigError("sweep: config has no 'sweep' block");
    build_coefficients(s); // validate the base scenario up front
    const SweepSpec& sw = *s.sweep;

    std::vector<std::string> rows(sw.values.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            std::size_t k = cursor.fetch_add(1);
            if (k >= sw.values.size() || failed.load()) return;
            try {
                ModelCoefficients c = build_swept_coefficients(s, sw.parameter, sw.values[k]);
                Field vhat = compute_vhat(c, 1e-10, s.solver.linear_tol);
                double r0 =
                    reproduction_number_direct(c, vhat, s.solver.eigen_tol, s.solver.linear_tol);
                EigenResult kappa =
                    cooperative_principal_eigenvalue(c, vhat, s.solver.eigen_tol);
                DiffusionLimits lim = diffusion_limits(c);
                std::string verdict = "-";
                if (sw.simulate) {
                    auto init = build_initial_fields(s);
                    SimState st{init[0], init[1], init[2], 0.0};
                    RunResult res = run_until_steady(st, c, run_options_from(s.solver));
                    verdict = verdict_name(res.verdict);
                }
                std::string row = std::to_string(k);
                for (double cell : {sw.values[k], r0, kappa.value, lim.small, lim.large}) {
                    row += ',';
                    row += format_g17(cell);
                }
                row += ',' + verdict + '\n';
                rows[k] = std::move(row);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true))
                    first_error = "sweep value " + format_g17(sw.values[k]) + ": " + e.what();
            }
        }
    };

    int nthreads = thread_budget(sw.values.size());
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failed.load()) throw SolverError(first_error);

    std::string body = "index,value,r0_direct,kappa0,limit_small,limit_large,verdict\n";
    for (const auto& row : rows) body += row;
    write_file(out_dir, "sweep.csv", body);
}

void cmd_ode(const Scenario& s, const std::string& out_dir) {
    if (!s.ode) throw ConfigError("ode: config has no 'ode' block");
    OdeRunOptions opts;
    opts.dt = s.solver.dt;
    opts.horizon = s.solver.horizon;
    opts.settle_tol = s.solver.settle_tol;
    opts.sample_dt = s.solver.sample_dt;
    OdeRunResult res = ode_run(s.ode->initial, s.ode->params, opts);

    std::string body = "t,h_i,v_u,v_i\n";
    for (std::size_t i = 0; i < res.t.size(); ++i)
        append_row(body, {res.t[i], res.h_i[i], res.v_u[i], res.v_i[i]});
    body += "# r0," + format_g17(res.r0) + "\n";
    body += std::string("# settled,") + (res.settled ? "1" : "0") + "\n";
    body += "# settle_time," + format_g17(res.settle_time) + "\n";
    body += std::string("# verdict,") + ode_verdict_name(res.verdict) + "\n";
    write_file(out_dir, "ode.csv", body);
}

namespace {

struct EquilibriaCsv {
    std::vector<double> vhat, h_i, v_u, v_i;
    bool has_endemic = false;
};

EquilibriaCsv read_equilibria_csv(const std::string& path, const Grid& g) {
    std::ifstream in(path);
    if (!in) throw ConfigError("verify: cannot open '" + path + "' (run the equilibria command first)");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("verify: '" + path + "' is empty");

    int coord_cols = g.dim == 2 ? 2 : 1;
    std::string plain = coordinate_header(g) + ",vhat";
    std::string endemic = plain + ",h_i,v_u,v_i";
    EquilibriaCsv out;
    if (line == endemic)
        out.has_endemic = true;
    else if (line != plain)
        throw ConfigError("verify: unexpected header '" + line + "' in '" + path + "'");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') break;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(std::strtod(cell.c_str(), nullptr));
        std::size_t expected = static_cast<std::size_t>(coord_cols) + (out.has_endemic ? 4 : 1);
        if (cells.size() != expected)
            throw ConfigError("verify: malformed row in '" + path + "'");
        out.vhat.push_back(cells[static_cast<std::size_t>(coord_cols)]);
        if (out.has_endemic) {
            out.h_i.push_back(cells[static_cast<std::size_t>(coord_cols) + 1]);
            out.v_u.push_back(cells[static_cast<std::size_t>(coord_cols) + 2]);
            out.v_i.push_back(cells[static_cast<std::size_t>(coord_cols) + 3]);
        }
    }
    if (static_cast<int>(out.vhat.size()) != g.size())
        throw ConfigError("verify: '" + path + "' row count does not match the grid");
    return out;
}

} // namespace

void cmd_verify(const Scenario& s, const std::string& out_dir) {
    ModelCoefficients c = build_coefficients(s);
    const Grid& g = *s.grid;
    EquilibriaCsv csv = read_equilibria_csv(out_dir + "/equilibria.csv", g);

    SparseOperator l1 = assemble_diffusion(c.delta1);
    SparseOperator l2 = assemble_diffusion(c.delta2);
    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    std::vector<double> work(csv.vhat.size());
    l2.apply(csv.vhat.data(), work.data());
    for (std::size_t i = 0; i < work.size(); ++i)
        work[i] += c.beta.values[i] * csv.vhat[i] - c.mu.values[i] * csv.vhat[i] * csv.vhat[i];
    double res_vhat = sup(work);

    std::string body = "check,residual\n";
    body += "vhat_logistic," + format_g17(res_vhat) + "\n";
    double worst = res_vhat;

    if (csv.has_endemic) {
        std::vector<double> rh(work.size()), ru(work.size()), ri(work.size());
        l1.apply(csv.h_i.data(), rh.data());
        l2.apply(csv.v_u.data(), ru.data());
        l2.apply(csv.v_i.data(), ri.data());
        for (std::size_t i = 0; i < work.size(); ++i) {
            double total = csv.v_u[i] + csv.v_i[i];
            double infect = c.sigma2.values[i] * csv.v_u[i] * csv.h_i[i];
            rh[i] += -c.lambda.values[i] * csv.h_i[i] +
                     c.sigma1.values[i] * c.h_u.values[i] * csv.v_i[i];
            ru[i] += -infect + c.beta.values[i] * total - c.mu.values[i] * total * csv.v_u[i];
            ri[i] += infect - c.mu.values[i] * total * csv.v_i[i];
        }
        body += "endemic_host," + format_g17(sup(rh)) + "\n";
        body += "endemic_vector_uninfected," + format_g17(sup(ru)) + "\n";
        body += "endemic_vector_infected," + format_g17(sup(ri)) + "\n";
        worst = std::max({worst, sup(rh), sup(ru), sup(ri)});
    }

    double threshold = 10.0 * s.solver.equilibrium_tol;
    body += std::string("# status,") + (worst <= threshold ? "ok" : "fail") + "\n";
    write_file(out_dir, "verify.csv", body);
    if (worst > threshold)
        throw SolverError("verify: stationary residual " + format_g17(worst) +
                          " exceeds threshold " + format_g17(threshold));
}

} // namespace vhrd
