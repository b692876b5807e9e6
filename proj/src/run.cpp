#include "hyperfall/run.hpp"
#include "hyperfall/dynamics.hpp"
#include "hyperfall/errors.hpp"
#include "hyperfall/freefall.hpp"
#include "hyperfall/kernel_oracle.hpp"
#include "hyperfall/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hyperfall {

using nlohmann::json;

namespace {

constexpr const char *kModule = "cli";

struct Pipeline {
    CurveSpec spec;
    DiscreteBody body;
    KernelParams kernel;
    GeometryDiagnostics diagnostics;
    ResistanceSet R;
    MassProperties mp;
};

Pipeline build(const RunConfig &config, int panels) {
    Pipeline p;
    const Scales sc = config.fluid.scales();
    p.spec = config.solver_body();
    p.body = discretize(p.spec, panels, config.discretization.order);
    p.kernel = KernelParams::make(sc.ell, sc.mu);
    p.diagnostics = validate_geometry(p.body, sc.ell);
    p.R = resistance_set(p.body, p.kernel);
    p.mp = mass_properties(p.spec, p.body, config.solver_m_c());
    return p;
}

void add_body(json &report, const Pipeline &p) {
    report["geometry"] = to_json(p.diagnostics);
    report["geometry"]["nodes"] = p.body.size();
    report["geometry"]["panels"] = p.body.panels;
    report["geometry"]["order"] = p.body.order;
    report["geometry"]["length"] = p.body.length;
    report["mass"] = to_json(p.mp);
    report["resistance"] = to_json(p.R);
}

std::filesystem::path write_file(const std::filesystem::path &dir, const std::string &name,
                                 const std::string &content) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError(kModule, "run", "cannot write " + path.string());
    out << content;
    if (!out)
        throw ConfigError(kModule, "run", "failed writing " + path.string());
    return path;
}

double dominant_lambda(const std::vector<SteadyState> &states) {
    double best = 0.0;
    for (const SteadyState &s : states)
        if (std::abs(s.lambda) > std::abs(best))
            best = s.lambda;
    return best;
}

} // namespace

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e) || dynamic_cast<const GeometryError *>(&e))
        return ExitConfig;
    if (dynamic_cast<const ConvergenceError *>(&e))
        return ExitGate;
    return ExitSolver;
}

KernelCheckTable kernel_check(const KernelParams &params) {
    params.validate();
    KernelCheckTable table;
    table.passed = true;
    for (double x : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
        KernelCheckRow row;
        row.r = x * params.ell;
        row.closed = kernel_scalars(row.r, params);
        row.oracle = fourier_oracle(row.r, params);
        const double scale = std::max(std::abs(row.oracle.A), std::abs(row.oracle.B));
        row.rel_err = std::max(std::abs(row.closed.A - row.oracle.A), std::abs(row.closed.B - row.oracle.B)) / scale;
        table.passed = table.passed && row.rel_err <= table.tolerance;
        table.rows.push_back(row);
    }
    return table;
}

ConvergenceTable convergence_study(const RunConfig &config) {
    if (!config.body)
        throw ConfigError(kModule, "convergence_study", "config has no body");
    if (config.body->kind == CurveKind::Polyline)
        throw ConfigError(kModule, "convergence_study", "convergence study needs a built-in shape (rod, ring, helix)");
    ConvergenceTable table;
    const int base = config.discretization.panels;
    for (int level = 0; level < 4; ++level) {
        const Pipeline p = build(config, base << level);
        ConvergenceRow row;
        row.panels = p.body.panels;
        row.nodes = p.body.size();
        row.A6 = p.R.A6;
        row.ktr_norm = p.R.K_tr.norm() / p.R.K_tt.norm();
        row.lambda = dominant_lambda(steady_states(p.R, p.mp));
        if (!table.rows.empty()) {
            const ConvergenceRow &prev = table.rows.back();
            row.difference = (row.A6 - prev.A6).norm() / row.A6.norm();
            if (prev.difference > 0.0)
                row.ratio = row.difference / prev.difference;
        }
        table.rows.push_back(row);
    }
    const ConvergenceRow &last = table.rows.back();
    if (last.difference <= 1e-12) {
        table.passed = true;
        table.note = "last difference at round-off floor";
    } else if (last.ratio >= 0.0 && last.ratio < 1.0) {
        table.passed = true;
        table.note = "successive differences decrease";
    } else {
        table.passed = false;
        table.note = "successive differences do not decrease";
    }
    return table;
}

void write_kernel_check_csv(std::ostream &out, const KernelCheckTable &table) {
    out << "r,A_closed,A_oracle,B_closed,B_oracle,rel_err\n";
    const auto old = out.precision(17);
    for (const KernelCheckRow &row : table.rows)
        out << row.r << ',' << row.closed.A << ',' << row.oracle.A << ',' << row.closed.B << ',' << row.oracle.B
            << ',' << row.rel_err << '\n';
    out.precision(old);
}

void write_convergence_csv(std::ostream &out, const ConvergenceTable &table) {
    out << "panels,nodes,K_tt11,K_tt22,K_tt33,K_rr11,K_rr22,K_rr33,K_tr_rel,lambda,difference,ratio\n";
    const auto old = out.precision(17);
    for (const ConvergenceRow &row : table.rows) {
        out << row.panels << ',' << row.nodes;
        for (int i = 0; i < 6; ++i)
            out << ',' << row.A6(i, i);
        out << ',' << row.ktr_norm << ',' << row.lambda << ',' << row.difference << ',' << row.ratio << '\n';
    }
    out.precision(old);
}

RunOutcome run(const RunConfig &config) {
    RunOutcome outcome;
    try {
        json report = report_header(config);
        const Scales sc = config.fluid.scales();
        const std::filesystem::path dir = config.outputs.dir;
        std::vector<std::pair<std::string, std::string>> files;

        switch (config.mode) {
        case RunMode::KernelCheck: {
            const KernelCheckTable table = kernel_check(KernelParams::make(sc.ell, sc.mu));
            json rows = json::array();
            for (const KernelCheckRow &row : table.rows)
                rows.push_back({{"r", row.r},
                                {"A_closed", row.closed.A},
                                {"A_oracle", row.oracle.A},
                                {"B_closed", row.closed.B},
                                {"B_oracle", row.oracle.B},
                                {"rel_err", row.rel_err}});
            report["kernel_check"] = {{"rows", rows}, {"tolerance", table.tolerance}, {"passed", table.passed}};
            std::ostringstream csv;
            write_kernel_check_csv(csv, table);
            files.emplace_back(config.outputs.table, csv.str());
            if (!table.passed) {
                outcome.exit_code = ExitGate;
                outcome.message = "cli::kernel_check: closed form misses the oracle beyond 1e-8";
            }
            break;
        }
        case RunMode::Convergence: {
            const ConvergenceTable table = convergence_study(config);
            json rows = json::array();
            for (const ConvergenceRow &row : table.rows) {
                json A6 = json::array();
                for (int i = 0; i < 6; ++i) {
                    json r = json::array();
                    for (int k = 0; k < 6; ++k)
                        r.push_back(row.A6(i, k));
                    A6.push_back(r);
                }
                rows.push_back({{"panels", row.panels},
                                {"nodes", row.nodes},
                                {"A6", A6},
                                {"K_tr_rel", row.ktr_norm},
                                {"lambda", row.lambda},
                                {"difference", row.difference},
                                {"ratio", row.ratio}});
            }
            report["convergence"] = {{"rows", rows}, {"passed", table.passed}, {"note", table.note}};
            std::ostringstream csv;
            write_convergence_csv(csv, table);
            files.emplace_back(config.outputs.table, csv.str());
            if (!table.passed) {
                outcome.exit_code = ExitGate;
                outcome.message = "cli::convergence_study: " + table.note;
            }
            break;
        }
        case RunMode::Mobility:
        case RunMode::Steady:
        case RunMode::Fall: {
            const Pipeline p = build(config, config.discretization.panels);
            add_body(report, p);
            if (config.mode == RunMode::Mobility)
                break;
            const FallOperator op = fall_operator(p.R, p.mp);
            const std::vector<SteadyState> states = steady_states(p.R, p.mp, op);
            report["fall_operator"] = to_json(op);
            json list = json::array();
            for (const SteadyState &s : states)
                list.push_back(to_json(s, sc, config.fluid.dimensional));
            report["steady_states"] = list;
            if (config.mode == RunMode::Steady)
                break;

            const DynamicsConfig dc = config.dynamics.value_or(DynamicsConfig{});
            const QuasiSteadyModel model(p.R, p.mp, sc.Re);
            const Trajectory traj = integrate(FallState::at_rest(dc.gravity), model, config.dynamics_params());
            const SteadyReport rep = detect_steady(traj, states, model, dc.detect_tol);
            report["trajectory"] = {{"steps", traj.steps},
                                    {"samples", traj.samples.size()},
                                    {"stopped_steady", traj.stopped_steady},
                                    {"final", to_json(traj.samples.back(), sc, config.fluid.dimensional)}};
            report["steady_detection"] = to_json(rep);
            std::ostringstream csv;
            write_trajectory_csv(csv, traj);
            files.emplace_back(config.outputs.trajectory, csv.str());
            break;
        }
        }

        report["exit_code"] = outcome.exit_code;
        outcome.report = report;
        outcome.artifacts.push_back(write_file(dir, config.outputs.report, report.dump(2) + "\n"));
        for (const auto &[name, content] : files)
            outcome.artifacts.push_back(write_file(dir, name, content));
    } catch (const Error &e) {
        outcome.exit_code = exit_code_for(e);
        outcome.message = e.what();
    } catch (const std::filesystem::filesystem_error &e) {
        outcome.exit_code = ExitConfig;
        outcome.message = std::string("cli::run: ") + e.what();
    }
    return outcome;
}

} // namespace hyperfall
