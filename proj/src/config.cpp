#include "pscd/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pscd {
namespace {

using nlohmann::json;

void allow_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key " + where + "." + key);
  }
}

template <typename T>
T get(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing key " + where + "." + key);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for " + where + "." + key);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& where, const char* key, T fallback) {
  return obj.contains(key) ? get<T>(obj, where, key) : fallback;
}

ModelSpec parse_model(const json& m) {
  const auto kind = get<std::string>(m, "model", "kind");
  if (kind == "gaussian") {
    allow_keys(m, "model", {"kind", "mu0", "mu1", "sigma"});
    return GaussianShift{get_or(m, "model", "mu0", 0.0), get_or(m, "model", "mu1", 1.0),
                         get_or(m, "model", "sigma", 1.0)};
  }
  if (kind == "complex_energy") {
    allow_keys(m, "model", {"kind", "sigma2", "lambda", "lambda_min", "lambda_max"});
    ComplexGaussianEnergySpec spec;
    spec.sigma2 = get_or(m, "model", "sigma2", 2.0);
    spec.lambda = get_or(m, "model", "lambda", std::vector<double>{});
    spec.lambda_min = get_or(m, "model", "lambda_min", 1.0);
    spec.lambda_max = get_or(m, "model", "lambda_max", 2.0);
    return spec;
  }
  if (kind == "bernoulli") {
    allow_keys(m, "model", {"kind", "p0", "p1"});
    return BernoulliPair{get<double>(m, "model", "p0"), get<double>(m, "model", "p1")};
  }
  throw ConfigError("unknown model.kind '" + kind + "'");
}

PriorSpec parse_prior(const json& p) {
  PriorSpec spec;
  const auto kind = get<std::string>(p, "prior", "kind");
  spec.pi_inf = get<double>(p, "prior", "pi_inf");
  if (kind == "geometric") {
    allow_keys(p, "prior", {"kind", "pi_inf", "theta"});
    spec.kind = ChangePointPrior::Kind::kGeometric;
    spec.theta = get<double>(p, "prior", "theta");
    return spec;
  }
  if (kind == "tabulated") {
    allow_keys(p, "prior", {"kind", "pi_inf", "head", "negbin", "tail_ratio"});
    spec.kind = ChangePointPrior::Kind::kTabulated;
    if (p.contains("head") == p.contains("negbin")) {
      throw ConfigError("prior needs exactly one of head and negbin");
    }
    if (p.contains("head")) {
      spec.head = get<std::vector<double>>(p, "prior", "head");
    } else {
      const json& nb = p.at("negbin");
      allow_keys(nb, "prior.negbin", {"shape", "theta", "length"});
      try {
        spec.head = ChangePointPrior::negative_binomial_head(
            get<int>(nb, "prior.negbin", "shape"), get<double>(nb, "prior.negbin", "theta"),
            spec.pi_inf, get<std::size_t>(nb, "prior.negbin", "length"));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
    if (p.contains("tail_ratio")) spec.tail_ratio = get<double>(p, "prior", "tail_ratio");
    return spec;
  }
  throw ConfigError("unknown prior.kind '" + kind + "'");
}

MetricSpec parse_metric(const json& obj, const char* key) {
  try {
    return MetricSpec::parse(get<std::string>(obj, "policy", key));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("policy.") + key + ": " + e.what());
  }
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config", {"experiment", "model", "prior", "policy", "run", "report"});
  for (const char* section : {"model", "prior", "policy", "run"}) {
    if (!root.contains(section)) throw ConfigError(std::string("missing section ") + section);
  }

  ConfigFile cfg;
  ExperimentConfig& ex = cfg.experiment;
  if (root.contains("experiment")) {
    allow_keys(root["experiment"], "experiment", {"name"});
    ex.name = get_or<std::string>(root["experiment"], "experiment", "name", ex.name);
  }
  ex.model = parse_model(root["model"]);
  ex.prior = parse_prior(root["prior"]);

  const json& pol = root["policy"];
  allow_keys(pol, "policy", {"rule", "alpha", "risk", "utility"});
  try {
    ex.rule = parse_rule(get_or<std::string>(pol, "policy", "rule", "simplified"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  ex.pair.alpha = get<double>(pol, "policy", "alpha");
  ex.pair.risk = parse_metric(pol, "risk");
  ex.pair.utility = parse_metric(pol, "utility");

  const json& run = root["run"];
  allow_keys(run, "run",
             {"K", "horizon", "deadline", "replications", "seed", "gfwer_m", "gfwer_stop"});
  ex.streams = get<std::size_t>(run, "run", "K");
  ex.horizon = get<Time>(run, "run", "horizon");
  ex.deadline = get_or<Time>(run, "run", "deadline", ex.horizon);
  ex.replications = get<std::size_t>(run, "run", "replications");
  ex.seed = get<std::uint64_t>(run, "run", "seed");
  if (run.contains("gfwer_m")) ex.gfwer_m = get<int>(run, "run", "gfwer_m");
  const auto stop = get_or<std::string>(run, "run", "gfwer_stop", "horizon");
  if (stop == "horizon") {
    ex.gfwer_stop = GfwerStop::kHorizon;
  } else if (stop == "first_detection") {
    ex.gfwer_stop = GfwerStop::kFirstDetection;
  } else {
    throw ConfigError("run.gfwer_stop must be horizon or first_detection");
  }

  if (root.contains("report")) {
    allow_keys(root["report"], "report", {"out_dir"});
    cfg.out_dir = get_or<std::string>(root["report"], "report", "out_dir", "out");
  }
  ex.validate();
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

MdpInstance mdp_instance(const ExperimentConfig& config) {
  const auto* bern = std::get_if<BernoulliPair>(&config.model);
  if (bern == nullptr) throw ConfigError("the decision-problem oracle needs Bernoulli streams");
  if (config.prior.kind != ChangePointPrior::Kind::kTabulated || config.prior.tail_ratio) {
    throw ConfigError("the decision-problem oracle needs a finite tabulated prior");
  }
  MdpInstance inst;
  inst.streams = config.streams;
  inst.horizon = config.horizon;
  inst.pre_pmf = {1.0 - bern->p0, bern->p0};
  inst.post_pmf = {1.0 - bern->p1, bern->p1};
  inst.prior_head = config.prior.head;
  inst.prior_never = config.prior.pi_inf;
  inst.pair = config.pair;
  try {
    inst.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return inst;
}

}  // namespace pscd
