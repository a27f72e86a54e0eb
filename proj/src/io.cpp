#include "pscd/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace pscd {
namespace {

using nlohmann::json;

json time_json(Time t) { return t == kNever ? json(nullptr) : json(t); }

Time time_from(const json& j) { return j.is_null() ? kNever : j.get<Time>(); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string trace_to_json(const DecisionTrace& trace) {
  json j;
  j["streams"] = trace.streams;
  j["horizon"] = trace.horizon;
  json steps = json::array();
  for (const auto& s : trace.steps) {
    json step = {{"t", s.t},       {"active", s.active}, {"hazard", s.hazard},
                 {"risk", s.risk}, {"utility", s.utility}};
    if (!s.weight.empty()) step["weight"] = s.weight;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  j["final_active"] = trace.final_active;
  json det = json::array();
  for (Time n : trace.detection) det.push_back(time_json(n));
  j["detection"] = std::move(det);
  json tau = json::array();
  for (Time t : trace.change_points) tau.push_back(time_json(t));
  j["change_points"] = std::move(tau);
  return j.dump(1);
}

DecisionTrace trace_from_json(const std::string& text) {
  DecisionTrace trace;
  try {
    const json j = json::parse(text);
    trace.streams = j.at("streams").get<std::size_t>();
    trace.horizon = j.at("horizon").get<Time>();
    for (const auto& s : j.at("steps")) {
      TraceStep step;
      step.t = s.at("t").get<Time>();
      step.active = s.at("active").get<std::vector<StreamId>>();
      step.hazard = s.value("hazard", 0.0);
      step.risk = s.value("risk", 0.0);
      step.utility = s.value("utility", 0.0);
      if (s.contains("weight")) step.weight = s["weight"].get<std::vector<double>>();
      if (step.t != static_cast<Time>(trace.steps.size()) + 1) {
        throw InvalidArgument("trace steps must be numbered 1, 2, ...");
      }
      trace.steps.push_back(std::move(step));
    }
    trace.final_active = j.at("final_active").get<std::vector<StreamId>>();
    for (const auto& n : j.at("detection")) trace.detection.push_back(time_from(n));
    if (j.contains("change_points")) {
      for (const auto& t : j["change_points"]) trace.change_points.push_back(time_from(t));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed trace: ") + e.what());
  }
  if (trace.detection.size() != trace.streams) {
    throw InvalidArgument("malformed trace: one detection time per stream expected");
  }
  return trace;
}

void save_trace(const DecisionTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << trace_to_json(trace) << '\n';
}

DecisionTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_json(buf.str());
}

void write_trajectory_csv(std::ostream& out, const AggregateReport& report) {
  out << "t,mean_fdp,mean_fnp,mean_idd,mean_irl,n_active_mean\n";
  for (std::size_t i = 0; i < report.mean_fdp.size(); ++i) {
    out << i + 1 << ',' << num(report.mean_fdp[i]) << ',' << num(report.mean_fnp[i]) << ','
        << num(report.mean_idd[i]) << ',' << num(report.mean_irl[i]) << ','
        << num(report.mean_active[i]) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const AggregateReport& report) {
  out << "K,alpha,afdr,afdr_se,tadd,tadd_se,tarl,tarl_se,gfwer,gfwer_se,replications,seed\n";
  out << report.streams << ',' << num(report.alpha) << ',' << num(report.afdr.mean) << ','
      << num(report.afdr.se) << ',' << num(report.tadd.mean) << ',' << num(report.tadd.se)
      << ',' << num(report.tarl.mean) << ',' << num(report.tarl.se) << ','
      << num(report.gfwer.mean) << ',' << num(report.gfwer.se) << ','
      << report.replications << ',' << report.seed << '\n';
}

void write_schedule(std::ostream& out, const DecisionTrace& trace) {
  out << "T_q\tD_q\n";
  for (const auto& [t, ids] : detection_schedule(trace)) {
    out << t << "\t{";
    for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i] + 1;
    out << "}\n";
  }
}

}  // namespace pscd
