#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace photon_beat {

/// One closed-form value compared with its quadrature ground truth.
struct OracleComparison {
    std::string function;
    std::string parameters;
    double closed_form = 0.0;
    double oracle = 0.0;
    double rel_error = 0.0;
    bool compared = true;  ///< false when |oracle| <= small_value_floor
    bool pass = true;
};

struct OracleSuiteReport {
    std::vector<OracleComparison> cases;
    double max_rel_error = 0.0;
    std::size_t failures = 0;
    std::size_t compared = 0;
    bool all_pass() const { return failures == 0 && compared > 0; }
};

struct OracleSuiteOptions {
    double rel_tolerance = 1e-6;
    /// Values at or below this magnitude are not compared relatively.
    double small_value_floor = 1e-10;
    /// Points per axis of each function's grid; 5 gives 125 cases per function.
    int points_per_axis = 5;
    std::function<void(const OracleComparison&)> on_case;
};

/// Compares p2_hom, p2_time_resolved, p2_jittered and hom_jittered with the
/// nested-quadrature oracle on fixed grids:
///   photon durations  0.1 ... 1.0 us
///   frequency offsets 0 ... 3.8 MHz (times 2 pi), frequency jitters 0 ... 3 MHz
///   arrival delays and emission jitters 0 ... 2 durations
///   detection-time differences 0 ... 2.5 widths
/// with cos^2 phi cycling over {1, 0.92, 0.5, 0}.
OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& opts = {});

}  // namespace photon_beat
