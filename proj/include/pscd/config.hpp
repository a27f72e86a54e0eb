#pragma once

#include <filesystem>
#include <string>

#include "pscd/harness.hpp"
#include "pscd/oracle.hpp"

namespace pscd {

/// A parsed configuration file. Layout (JSON, unknown keys rejected):
///
///   experiment: {name}
///   model:  {kind: gaussian, mu0, mu1, sigma}
///         | {kind: complex_energy, sigma2, lambda | lambda_min, lambda_max}
///         | {kind: bernoulli, p0, p1}
///   prior:  {kind: geometric, pi_inf, theta}
///         | {kind: tabulated, pi_inf, head | negbin: {shape, theta, length},
///            tail_ratio?}
///   policy: {rule, alpha, risk, utility}
///   run:    {K, horizon, deadline?, replications, seed, gfwer_m?, gfwer_stop?}
///   report: {out_dir}
struct ConfigFile {
  ExperimentConfig experiment;
  std::filesystem::path out_dir = "out";
};

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

/// The finite decision problem described by a config with Bernoulli streams
/// and a tabulated prior.
MdpInstance mdp_instance(const ExperimentConfig& config);

}  // namespace pscd
