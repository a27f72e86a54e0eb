#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pscd/oracle.hpp"

namespace pscd {

// Randomized and exact cross-checks between the fast code paths and the
// brute-force references. Shared by the command line tool and the test suites.

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;

  bool ok() const;
  void add(std::string name, bool pass, std::string detail);
  void append(const CheckReport& other);
  void print(std::ostream& out) const;
};

/// Recursive vs direct posterior on simulated Gaussian-shift streams with a
/// geometric prior (pi_inf 0.2, theta 0.1). Passes when max |dW| < 1e-10.
CheckReport check_posterior(std::size_t trials, Time length, std::uint64_t seed);

/// Sorted-prefix rule vs exhaustive enumeration over every admissible pair on
/// random instances with up to `max_streams` streams.
CheckReport check_selection(std::size_t instances, std::size_t max_streams,
                            std::uint64_t seed);

/// GLFWER dynamic program vs enumeration.
CheckReport check_glfwer(std::size_t instances, std::size_t max_streams, int max_m,
                         std::uint64_t seed);

/// Optimal S_2 tables for targets r = 1 and r = 2 on the LFDR counterexample,
/// plus the absence of a uniformly optimal decision.
CheckReport check_counterexample(const MdpInstance& instance);

/// The simplified procedure attains V_0^{(r)} for every r on an LFNR / IARL
/// instance, and a uniformly optimal decision exists there.
CheckReport check_uniform_optimality();

/// Dispatches posterior, selection, glfwer, mdp, counterexample or all.
CheckReport run_check_suite(const std::string& suite, std::uint64_t seed);

}  // namespace pscd
