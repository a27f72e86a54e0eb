#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pscd/harness.hpp"
#include "pscd/policy.hpp"

namespace pscd {

/// JSON form of a trace. Times equal to kNever are written as null.
std::string trace_to_json(const DecisionTrace& trace);
DecisionTrace trace_from_json(const std::string& text);

void save_trace(const DecisionTrace& trace, const std::filesystem::path& path);
DecisionTrace load_trace(const std::filesystem::path& path);

/// t, mean_fdp, mean_fnp, mean_idd, mean_irl, n_active_mean
void write_trajectory_csv(std::ostream& out, const AggregateReport& report);
/// K, alpha, afdr, afdr_se, tadd, tadd_se, tarl, tarl_se, gfwer, gfwer_se,
/// replications, seed
void write_summary_csv(std::ostream& out, const AggregateReport& report);

/// Prints one "T_q  D_q" row per detection time, ids 1-based as in the text.
void write_schedule(std::ostream& out, const DecisionTrace& trace);

}  // namespace pscd
