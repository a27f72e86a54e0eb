// Python bindings: priors, posterior updates, metrics, selection rules,
// experiments and oracle checks.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pscd/checks.hpp"
#include "pscd/config.hpp"
#include "pscd/io.hpp"
#include "pscd/posterior.hpp"

namespace py = pybind11;
using namespace pscd;

namespace {

py::dict selection_dict(const Selection& s) {
  py::dict d;
  d["next"] = s.next;
  d["risk"] = s.risk;
  d["utility"] = s.utility;
  return d;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["se"] = e.se;
  return d;
}

py::dict report_dict(const AggregateReport& r) {
  py::dict d;
  d["K"] = r.streams;
  d["alpha"] = r.alpha;
  d["replications"] = r.replications;
  d["seed"] = r.seed;
  d["afdr"] = estimate_dict(r.afdr);
  d["tadd"] = estimate_dict(r.tadd);
  d["tarl"] = estimate_dict(r.tarl);
  d["gfwer"] = estimate_dict(r.gfwer);
  d["mean_fdp"] = r.mean_fdp;
  d["se_fdp"] = r.se_fdp;
  d["mean_fnp"] = r.mean_fnp;
  d["se_fnp"] = r.se_fnp;
  d["mean_idd"] = r.mean_idd;
  d["mean_irl"] = r.mean_irl;
  d["n_active_mean"] = r.mean_active;
  d["steps"] = r.steps;
  d["risk_violations"] = r.risk_violations;
  return d;
}

Selection run_select(const std::string& rule, const std::vector<StreamId>& active,
                     const std::vector<double>& weight, double hazard, const std::string& risk,
                     const std::string& utility, double alpha) {
  if (active.size() != weight.size()) throw InvalidArgument("active and weight differ in length");
  const RiskUtilityPair pair{MetricSpec::parse(risk), MetricSpec::parse(utility), alpha};
  return select(parse_rule(rule), StepView{active, weight, hazard}, pair);
}

}  // namespace

PYBIND11_MODULE(_pscd, m) {
  m.doc() = "Compound-risk-controlled parallel sequential change detection";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<SurvivalExhausted>(m, "SurvivalExhausted", base.ptr());
  py::register_exception<SizeGuard>(m, "SizeGuard", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<ChangePointPrior>(m, "ChangePointPrior")
      .def_static("geometric", &ChangePointPrior::geometric, py::arg("pi_inf"), py::arg("theta"),
                  py::arg("horizon"))
      .def_static("tabulated", &ChangePointPrior::tabulated, py::arg("head"), py::arg("pi_inf"),
                  py::arg("horizon"), py::arg("tail_ratio") = std::nullopt)
      .def_static("negative_binomial_head", &ChangePointPrior::negative_binomial_head,
                  py::arg("shape"), py::arg("theta"), py::arg("pi_inf"), py::arg("length"))
      .def("mass", &ChangePointPrior::mass, py::arg("t"))
      .def("survival", &ChangePointPrior::survival, py::arg("t"))
      .def("hazard", &ChangePointPrior::hazard, py::arg("t"))
      .def_property_readonly("mass_never", &ChangePointPrior::mass_never)
      .def_property_readonly("horizon", &ChangePointPrior::horizon);

  py::class_<PosteriorState>(m, "PosteriorState")
      .def(py::init<std::size_t>(), py::arg("streams"))
      .def("advance",
           [](PosteriorState& s, const ChangePointPrior& prior, const std::vector<double>& l) {
             s.advance(prior, l);
           },
           py::arg("prior"), py::arg("log_lr"))
      .def("retain",
           [](PosteriorState& s, const std::vector<StreamId>& keep) { s.retain(keep); },
           py::arg("keep"))
      .def("weights", &PosteriorState::weights)
      .def_property_readonly("active", [](const PosteriorState& s) {
        return std::vector<StreamId>(s.active().begin(), s.active().end());
      })
      .def_property_readonly("time", &PosteriorState::time);

  m.def("direct_posterior",
        [](const ChangePointPrior& prior, const std::vector<double>& log_lr) {
          return direct_posterior(prior, log_lr);
        },
        py::arg("prior"), py::arg("log_lr"));
  m.def("change_by_now", &change_by_now, py::arg("weight"), py::arg("hazard"));

  auto vec = [](double (*f)(std::span<const double>)) {
    return [f](const std::vector<double>& w) { return f(w); };
  };
  m.def("lfwer", vec(&lfwer), py::arg("kept"));
  m.def("lfnr", vec(&lfnr), py::arg("kept"));
  m.def("lfdr", vec(&lfdr), py::arg("removed"));
  m.def("iadd", vec(&iadd), py::arg("kept"));
  m.def("glfwer", [](const std::vector<double>& w, int k) { return glfwer(w, k); },
        py::arg("kept"), py::arg("m"));
  m.def("iarl", [](const std::vector<double>& w, double h) { return iarl(w, h); },
        py::arg("kept"), py::arg("hazard"));
  m.def("enumerate_glfwer",
        [](const std::vector<double>& w, int k) { return enumerate_glfwer(w, k); },
        py::arg("weight"), py::arg("m"));

  m.def("select",
        [](const std::string& rule, const std::vector<StreamId>& active,
           const std::vector<double>& weight, double hazard, const std::string& risk,
           const std::string& utility, double alpha) {
          return selection_dict(run_select(rule, active, weight, hazard, risk, utility, alpha));
        },
        py::arg("rule"), py::arg("active"), py::arg("weight"), py::arg("hazard"),
        py::arg("risk"), py::arg("utility"), py::arg("alpha"),
        "Chooses S_{t+1} from S_t = active. Returns {next, risk, utility}.");

  m.def("run_experiment",
        [](const std::string& config_text, std::optional<std::size_t> replications,
           std::optional<std::uint64_t> seed, std::optional<std::size_t> streams,
           unsigned threads) {
          ExperimentConfig ex = parse_config(config_text).experiment;
          if (replications) ex.replications = *replications;
          if (seed) ex.seed = *seed;
          if (streams) ex.streams = *streams;
          ex.threads = threads;
          AggregateReport r;
          {
            py::gil_scoped_release release;
            r = run_experiment(ex);
          }
          return report_dict(r);
        },
        py::arg("config"), py::arg("replications") = std::nullopt,
        py::arg("seed") = std::nullopt, py::arg("streams") = std::nullopt,
        py::arg("threads") = 0u, "Runs a JSON config and returns the aggregate report.");

  m.def("run_replication_trace",
        [](const std::string& config_text, std::size_t index) {
          const ExperimentConfig ex = parse_config(config_text).experiment;
          return trace_to_json(run_replication(ex, index, true));
        },
        py::arg("config"), py::arg("index") = 0,
        "One replication as a JSON trace.");

  m.def("schedule",
        [](const std::string& trace_json) {
          std::vector<std::pair<Time, std::vector<StreamId>>> out;
          for (auto& [t, d] : detection_schedule(trace_from_json(trace_json))) {
            out.emplace_back(t, d);
          }
          return out;
        },
        py::arg("trace"), "Detection times T_q and sets D_q (0-based ids) of a JSON trace.");

  m.def("oracle_check",
        [](const std::string& suite, std::uint64_t seed) {
          std::vector<std::tuple<std::string, bool, std::string>> out;
          for (const auto& l : run_check_suite(suite, seed).lines) {
            out.emplace_back(l.name, l.pass, l.detail);
          }
          return out;
        },
        py::arg("suite"), py::arg("seed") = 20240601u,
        "Runs an oracle suite; returns (name, passed, detail) tuples.");
}
