#include "pscd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pscd/numeric.hpp"

namespace pscd {
namespace {

void require_weights(std::span<const double> w) {
  for (double x : w) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw InvalidArgument("posterior weight outside [0, 1]: " + std::to_string(x));
    }
  }
}

double sum(std::span<const double> w) { return std::accumulate(w.begin(), w.end(), 0.0); }

double denominator(std::size_t n) { return static_cast<double>(std::max<std::size_t>(n, 1)); }

// Incremental Poisson-binomial tail P(count >= m).
class TailDp {
 public:
  explicit TailDp(int m) : below_(static_cast<std::size_t>(m), 0.0) { below_[0] = 1.0; }

  void add(double w) {
    const std::size_t m = below_.size();
    tail_ += below_[m - 1] * w;
    for (std::size_t j = m - 1; j > 0; --j) {
      below_[j] = below_[j] * (1.0 - w) + below_[j - 1] * w;
    }
    below_[0] *= 1.0 - w;
  }

  double tail() const { return tail_; }

 private:
  std::vector<double> below_;  // P(count == j), j < m
  double tail_ = 0.0;
};

}  // namespace

double lfwer(std::span<const double> kept) {
  require_weights(kept);
  double log_none = 0.0;
  for (double w : kept) log_none += std::log1p(-w);
  return -std::expm1(log_none);
}

double glfwer(std::span<const double> kept, int m) {
  if (m < 1) throw InvalidArgument("GLFWER needs m >= 1");
  if (m == 1) return lfwer(kept);
  require_weights(kept);
  if (static_cast<std::size_t>(m) > kept.size()) return 0.0;
  TailDp dp(m);
  for (double w : kept) dp.add(w);
  return dp.tail();
}

double lfnr(std::span<const double> kept) {
  require_weights(kept);
  return sum(kept) / denominator(kept.size());
}

double lfdr(std::span<const double> removed) {
  require_weights(removed);
  double s = 0.0;
  for (double w : removed) s += 1.0 - w;
  return s / denominator(removed.size());
}

double iadd(std::span<const double> kept) {
  require_weights(kept);
  return sum(kept);
}

double iarl(std::span<const double> kept, double hazard) {
  require_weights(kept);
  double s = 0.0;
  for (double w : kept) s += (1.0 - hazard) * (1.0 - w);
  return s;
}

double iarl(std::span<const double> kept, std::span<const double> change_by_now) {
  if (kept.size() != change_by_now.size()) {
    throw InvalidArgument("need one g(W) per kept stream");
  }
  require_weights(kept);
  double s = 0.0;
  for (double g : change_by_now) s += 1.0 - g;
  return s;
}

MetricSpec MetricSpec::parse(std::string_view name) {
  MetricSpec spec;
  constexpr std::string_view kNeg = "neg-";
  if (name.substr(0, kNeg.size()) == kNeg) {
    spec.sign = -1;
    name.remove_prefix(kNeg.size());
  }
  if (name == "lfwer") {
    spec.kind = MetricKind::kLfwer;
  } else if (name == "lfnr") {
    spec.kind = MetricKind::kLfnr;
  } else if (name == "lfdr") {
    spec.kind = MetricKind::kLfdr;
  } else if (name == "iadd") {
    spec.kind = MetricKind::kIadd;
  } else if (name == "iarl") {
    spec.kind = MetricKind::kIarl;
  } else if (name.substr(0, 7) == "glfwer:") {
    spec.kind = MetricKind::kGlfwer;
    const std::string digits(name.substr(7));
    std::size_t used = 0;
    int m = 0;
    try {
      m = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (digits.empty() || used != digits.size() || m < 1) {
      throw InvalidArgument("glfwer needs a count m >= 1, as in glfwer:2");
    }
    spec.m = m;
  } else {
    throw InvalidArgument("unknown metric '" + std::string(name) + "'");
  }
  return spec;
}

std::string MetricSpec::name() const {
  std::string base;
  switch (kind) {
    case MetricKind::kLfwer: base = "lfwer"; break;
    case MetricKind::kGlfwer: base = "glfwer:" + std::to_string(m); break;
    case MetricKind::kLfnr: base = "lfnr"; break;
    case MetricKind::kLfdr: base = "lfdr"; break;
    case MetricKind::kIadd: base = "iadd"; break;
    case MetricKind::kIarl: base = "iarl"; break;
  }
  return sign < 0 ? "neg-" + base : base;
}

bool RiskUtilityPair::admissible() const {
  const auto risk_ok = [](const MetricSpec& s) {
    switch (s.kind) {
      case MetricKind::kIarl: return s.sign < 0;
      default: return s.sign > 0;
    }
  };
  const auto utility_ok = [](const MetricSpec& s) {
    switch (s.kind) {
      case MetricKind::kIarl: return s.sign > 0;
      default: return s.sign < 0;
    }
  };
  return risk_ok(risk) && utility_ok(utility);
}

std::vector<std::pair<MetricSpec, MetricSpec>> admissible_combinations(int glfwer_m) {
  const std::vector<MetricSpec> risks = {lfwer_spec(), glfwer_spec(glfwer_m), lfnr_spec(),
                                         iadd_spec(), lfdr_spec(), iarl_spec().negated()};
  const std::vector<MetricSpec> utilities = {
      iarl_spec(),           lfdr_spec().negated(), lfwer_spec().negated(),
      glfwer_spec(glfwer_m).negated(), lfnr_spec().negated(), iadd_spec().negated()};
  std::vector<std::pair<MetricSpec, MetricSpec>> out;
  for (const auto& r : risks) {
    for (const auto& u : utilities) out.emplace_back(r, u);
  }
  return out;
}

double evaluate(const MetricSpec& spec, const StepView& view,
                std::span<const StreamId> next) {
  if (view.active.size() != view.weight.size()) {
    throw InvalidArgument("step view: ids and weights differ in length");
  }
  std::vector<double> kept;
  std::vector<double> removed;
  kept.reserve(next.size());
  removed.reserve(view.active.size() - std::min(view.active.size(), next.size()));
  std::size_t j = 0;
  for (std::size_t i = 0; i < view.active.size(); ++i) {
    if (j < next.size() && next[j] == view.active[i]) {
      kept.push_back(view.weight[i]);
      ++j;
    } else {
      if (j < next.size() && next[j] < view.active[i]) break;
      removed.push_back(view.weight[i]);
    }
  }
  if (j != next.size()) {
    throw InvalidArgument("next active set is not a sorted subset of the current one");
  }

  return evaluate_split(spec, kept, removed, view.hazard);
}

double evaluate_split(const MetricSpec& spec, std::span<const double> kept,
                      std::span<const double> removed, double hazard) {
  double value = 0.0;
  switch (spec.kind) {
    case MetricKind::kLfwer: value = lfwer(kept); break;
    case MetricKind::kGlfwer: value = glfwer(kept, spec.m); break;
    case MetricKind::kLfnr: value = lfnr(kept); break;
    case MetricKind::kLfdr: value = lfdr(removed); break;
    case MetricKind::kIadd: value = iadd(kept); break;
    case MetricKind::kIarl: value = iarl(kept, hazard); break;
  }
  return spec.sign * value;
}

std::vector<double> prefix_values(const MetricSpec& spec,
                                  std::span<const double> sorted_weight, double hazard) {
  require_weights(sorted_weight);
  const std::size_t n = sorted_weight.size();
  std::vector<double> out(n + 1, 0.0);
  switch (spec.kind) {
    case MetricKind::kLfwer: {
      double log_none = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        log_none += std::log1p(-sorted_weight[i]);
        out[i + 1] = -std::expm1(log_none);
      }
      break;
    }
    case MetricKind::kGlfwer: {
      if (spec.m < 1) throw InvalidArgument("GLFWER needs m >= 1");
      if (spec.m == 1) {
        return prefix_values({MetricKind::kLfwer, 1, spec.sign}, sorted_weight, hazard);
      }
      TailDp dp(spec.m);
      for (std::size_t i = 0; i < n; ++i) {
        dp.add(sorted_weight[i]);
        out[i + 1] = dp.tail();
      }
      break;
    }
    case MetricKind::kLfnr: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += sorted_weight[i];
        out[i + 1] = s / static_cast<double>(i + 1);
      }
      break;
    }
    case MetricKind::kIadd: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += sorted_weight[i];
        out[i + 1] = s;
      }
      break;
    }
    case MetricKind::kIarl: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        s += (1.0 - hazard) * (1.0 - sorted_weight[i]);
        out[i + 1] = s;
      }
      break;
    }
    case MetricKind::kLfdr: {
      // Prefix n keeps the n smallest; the removed set is the suffix [n, size).
      double s = 0.0;
      out[n] = 0.0;
      for (std::size_t i = n; i > 0; --i) {
        s += 1.0 - sorted_weight[i - 1];
        out[i - 1] = s / static_cast<double>(n - i + 1);
      }
      break;
    }
  }
  if (spec.sign < 0) {
    for (auto& v : out) v = -v;
  }
  return out;
}

bool check_assumption1(const RiskUtilityPair& pair, const StepView& view) {
  const double keep_none = evaluate(pair.risk, view, {});
  const double keep_all = evaluate(pair.risk, view, view.active);
  return std::min(keep_none, keep_all) <= pair.alpha;
}

MonotonicityReport check_polynomial_monotonicity(const CoefficientTable& c,
                                                 double tolerance) {
  MonotonicityReport report{true, true};
  const auto coef = [&](std::size_t p, std::size_t k) {
    return k < c[p].size() ? c[p][k] : 0.0;
  };
  const std::size_t p_max = c.empty() ? 0 : c.size() - 1;
  for (std::size_t p = 1; p <= p_max; ++p) {
    for (std::size_t i = 0; i < p; ++i) {
      double s = 0.0;
      for (std::size_t k = 1; k <= p - i; ++k) {
        s += coef(p, k) * binomial(static_cast<std::int64_t>(p - i - 1),
                                   static_cast<std::int64_t>(k - 1));
      }
      if (s < -tolerance) report.entrywise = false;
    }
  }
  report.appending = report.entrywise;
  for (std::size_t p = 0; p + 1 <= p_max; ++p) {
    for (std::size_t i = 0; i <= p; ++i) {
      double s = 0.0;
      for (std::size_t k = 1; k <= p - i; ++k) {
        s += (coef(p + 1, k) - coef(p, k)) *
             binomial(static_cast<std::int64_t>(p - i), static_cast<std::int64_t>(k));
      }
      if (s < -tolerance) report.appending = false;
    }
  }
  return report;
}

CoefficientTable polynomial_coefficients(const MetricSpec& spec, int p_max) {
  if (p_max < 0) throw InvalidArgument("p_max must be non-negative");
  CoefficientTable c(static_cast<std::size_t>(p_max) + 1);
  for (int p = 0; p <= p_max; ++p) {
    auto& row = c[static_cast<std::size_t>(p)];
    row.assign(static_cast<std::size_t>(p) + 1, 0.0);
    for (int k = 1; k <= p; ++k) {
      double v = 0.0;
      switch (spec.kind) {
        case MetricKind::kLfwer: v = (k % 2 == 1) ? 1.0 : -1.0; break;
        case MetricKind::kGlfwer:
          if (k >= spec.m) {
            v = (((k - spec.m) % 2 == 0) ? 1.0 : -1.0) * binomial(k - 1, spec.m - 1);
          }
          break;
        case MetricKind::kLfnr: v = (k == 1) ? 1.0 / p : 0.0; break;
        case MetricKind::kIadd: v = (k == 1) ? 1.0 : 0.0; break;
        case MetricKind::kLfdr:
        case MetricKind::kIarl:
          throw InvalidArgument(spec.name() +
                                " is not a polynomial in the kept weights alone");
      }
      row[static_cast<std::size_t>(k)] = spec.sign * v;
    }
  }
  return c;
}

}  // namespace pscd
