#pragma once

#include "hyperfall/config.hpp"
#include "hyperfall/kernel.hpp"
#include "hyperfall/mobility.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hyperfall {

enum ExitCode : int { ExitOk = 0, ExitConfig = 2, ExitSolver = 3, ExitGate = 4 };

// 2 for configuration and geometry errors, 4 for convergence failures, 3 for
// any other library error.
int exit_code_for(const std::exception &e);

struct KernelCheckRow {
    double r = 0.0;
    KernelScalars closed;
    KernelScalars oracle;
    double rel_err = 0.0; // max(|dA|, |dB|) / max(|A|, |B|)
};

struct KernelCheckTable {
    std::vector<KernelCheckRow> rows;
    double tolerance = 1e-8;
    bool passed = false;
};

// Closed form against the Fourier oracle at r/ell in {0, 0.01, 0.1, 1, 10, 100}.
KernelCheckTable kernel_check(const KernelParams &params);

struct ConvergenceRow {
    int panels = 0;
    std::size_t nodes = 0;
    Mat6 A6 = Mat6::Zero();
    double ktr_norm = 0.0;  // ||K_tr|| / ||K_tt||
    double lambda = 0.0;    // real eigenvalue of largest magnitude
    double difference = -1.0; // ||A6 - A6_prev|| / ||A6||, -1 on the first row
    double ratio = -1.0;      // difference / previous difference, -1 when undefined
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    bool passed = false;
    std::string note;
};

// Resistance at panels N, 2N, 4N, 8N. The gate passes when the last
// successive-difference ratio is below 1, or when the last difference already
// sits at the round-off floor (1e-12 relative).
ConvergenceTable convergence_study(const RunConfig &config);

void write_kernel_check_csv(std::ostream &out, const KernelCheckTable &table);
void write_convergence_csv(std::ostream &out, const ConvergenceTable &table);

struct RunOutcome {
    int exit_code = ExitOk;
    std::string message;
    nlohmann::json report;
    std::vector<std::filesystem::path> artifacts;
};

// Runs the pipeline of config.mode and writes the JSON report and CSV tables
// into config.outputs.dir. Library errors are caught and mapped to exit
// codes; nothing is written when the run fails before producing results.
RunOutcome run(const RunConfig &config);

} // namespace hyperfall
