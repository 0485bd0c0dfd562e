// Command-line front end: ground-state, kirchhoff, threshold, sweep and verify.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/functional.hpp"
#include "kirchhoff/radial_shooting.hpp"

namespace kirchhoff::cli {

/// Process exit codes; stable across releases.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kShootingFailure = 2,    // NO_BRACKET, SHOOTING_FAILED, INTEGRATION_BLOWUP
    kHypothesisRejected = 3, // model or problem fails its hypotheses
    kNoSolution = 4,         // NONE_N4 or NO_ROOT
    kGateFailure = 5,        // a verification residual exceeded its tolerance
};

/// Tolerances and numerical settings; echoed into every JSON report.
struct RunConfig {
    double tol = 1e-12;
    int grid = 4096;
    double decay_threshold = 1e-8;
    double r_max = 0;
    double eps_eq = 1e-9;
    VerificationTolerances<double> gates;
    std::uint64_t seed = 0;
    int jobs = 1;

    ShootingOptions<double> shooting() const;
    nlohmann::json to_json() const;
};

enum class VerifyLevel { None, Pohozaev, Full };

struct SweepRange {
    double lo = 1;
    double hi = 1;
    int steps = 1;
    bool log = false;

    void validate(const std::string& name) const;
    std::vector<double> values() const;
};

struct SweepSpec {
    int N = 3;
    PowerModel model;
    SweepRange a;
    SweepRange b;
    std::string output;
    VerifyLevel level = VerifyLevel::None;
};

struct SweepRow {
    int N = 0;
    double a = 0, b = 0, K = 0;
    std::string regime;
    std::optional<double> t1, t2, a_max, I, pohozaev_res, pde_res;
};

inline constexpr const char* kSweepHeader = "N,a,b,K,regime,t1,t2,a_max,I,pohozaev_res,pde_res";

/// One (a, b) point of a sweep against a precomputed ground state. Failures
/// are reported as regime "ERROR" rather than thrown.
SweepRow evaluate_sweep_row(const Profile& ground, double a, double b, VerifyLevel level, const RunConfig& cfg);

/// Rows in a-major order; evaluated on cfg.jobs threads.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Profile& ground, const RunConfig& cfg);

std::string format_row(const SweepRow& row);

/// Entry point shared by the solve binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kirchhoff::cli
