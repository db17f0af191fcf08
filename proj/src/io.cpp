#include "hardcore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace hardcore::io {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

json json_number(double x) {
  if (std::isfinite(x)) return json(x);
  return json(format_double(x));
}

const char* to_string(IterStatus status) {
  switch (status) {
    case IterStatus::ConvergedUnique: return "converged_unique";
    case IterStatus::ConvergedPeriod2: return "converged_period2";
    case IterStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

const char* to_string(Stability stability) {
  switch (stability) {
    case Stability::Attracting: return "attracting";
    case Stability::Repelling: return "repelling";
    case Stability::Neutral: return "neutral";
  }
  return "unknown";
}

const char* to_string(TransitionOrder order) {
  switch (order) {
    case TransitionOrder::First: return "first";
    case TransitionOrder::Second: return "second";
    case TransitionOrder::Undetermined: return "undetermined";
  }
  return "unknown";
}

json to_json(const RootLaw& law) {
  json out;
  out["level"] = law.level;
  out["p"] = json::array();
  for (double v : law.p) out["p"].push_back(json_number(v));
  return out;
}

json to_json(const FixedPoint& point) {
  json out;
  out["x"] = json_number(point.value);
  out["deriv"] = json_number(point.map_deriv);
  out["stability"] = to_string(point.stability);
  return out;
}

json to_json(const FixedPointSet& set) {
  json out;
  out["count"] = set.points.size();
  out["near_tangency"] = set.near_tangency;
  out["points"] = json::array();
  for (const FixedPoint& p : set.points) out["points"].push_back(to_json(p));
  return out;
}

json to_json(const SShapeReport& report) {
  json out;
  out["is_s_shaped"] = report.is_s_shaped;
  if (report.is_s_shaped)
    out["inflection"] = json_number(report.inflection);
  else
    out["violation"] = report.violation;
  return out;
}

json to_json(const Trajectory& trajectory) {
  json out;
  out["status"] = to_string(trajectory.status);
  out["levels"] = trajectory.levels;
  out["even_limit"] = to_json(trajectory.even_limit);
  out["odd_limit"] = to_json(trajectory.odd_limit);
  out["m"] = json_number(trajectory.m);
  out["M"] = json_number(trajectory.M);
  return out;
}

json to_json(const PhasePoint& point) {
  json out;
  out["lambda"] = json_number(point.lambda);
  out["delta"] = json_number(point.delta);
  out["coexists"] = point.coexists;
  out["m"] = json_number(point.m);
  out["M"] = json_number(point.M);
  out["iterations"] = point.iterations;
  out["undetermined"] = point.undetermined;
  return out;
}

json to_json(const CriticalSearch& search) {
  json out;
  out["lambda_lo"] = json_number(search.lambda_lo);
  out["lambda_hi"] = json_number(search.lambda_hi);
  out["bracket_valid"] = search.bracket_valid;
  out["delta_above"] = json_number(search.delta_above);
  out["probes"] = json::array();
  for (const PhasePoint& p : search.probes) out["probes"].push_back(to_json(p));
  if (!search.diagnostics.empty()) out["diagnostics"] = search.diagnostics;
  return out;
}

json to_json(const OrderResult& result) {
  json out;
  out["order"] = to_string(result.order);
  out["jump_estimate"] = json_number(result.jump_estimate);
  out["fitted_power"] = json_number(result.fitted_power);
  out["probes"] = json::array();
  for (const PhasePoint& p : result.probes) out["probes"].push_back(to_json(p));
  if (!result.diagnostics.empty()) out["diagnostics"] = result.diagnostics;
  return out;
}

json to_json(const WindowProbe& probe) {
  json out;
  out["gamma"] = json_number(probe.gamma);
  out["lambda"] = json_number(probe.lambda);
  out["expect_coexist"] = probe.expect_coexist;
  out["outcome"] = to_json(probe.outcome);
  out["matches"] = probe.matches;
  return out;
}

json to_json(const WindowResult& result) {
  json out;
  out["all_match"] = result.all_match;
  out["probes"] = json::array();
  for (const WindowProbe& p : result.probes) out["probes"].push_back(to_json(p));
  out["x_low_seed"] = json_number(result.x_low_seed);
  out["x_high_seed"] = json_number(result.x_high_seed);
  return out;
}

json to_json(const SampleResult& result) {
  json out;
  out["law"] = to_json(result.law);
  out["std_error"] = json::array();
  for (double v : result.std_error) out["std_error"].push_back(json_number(v));
  out["samples"] = result.samples;
  out["seed"] = result.seed;
  return out;
}

json to_json(const LossStats& stats, const LossGraph& graph) {
  json out;
  out["seed"] = stats.seed;
  out["events"] = stats.events;
  out["total_time"] = json_number(stats.total_time);
  out["nodes"] = json::array();
  for (int v = 0; v < graph.n; ++v) {
    json node;
    node["node"] = v;
    node["occupancy"] = json::array();
    for (double f : stats.node_occupancy[v]) node["occupancy"].push_back(json_number(f));
    node["arrivals"] = stats.arrivals[v];
    node["blocked"] = stats.blocked[v];
    node["blocking_fraction"] = json_number(stats.blocking_fraction(v));
    out["nodes"].push_back(std::move(node));
  }
  // The joint law is only worth emitting when it is small enough to read.
  if (stats.joint_time.size() <= 1024) {
    std::vector<std::pair<std::uint64_t, double>> items(stats.joint_time.begin(),
                                                        stats.joint_time.end());
    std::sort(items.begin(), items.end());
    json joint;
    for (const auto& [code, frac] : items)
      joint[std::to_string(code)] = json_number(frac);
    out["joint_time"] = std::move(joint);
  }
  return out;
}

namespace {

std::string csv_bool(bool v) { return v ? "1" : "0"; }

}  // namespace

std::string law_csv(const RootLaw& law) {
  std::ostringstream out;
  out << kCsvSchema << "spin,prob\n";
  for (std::size_t i = 0; i < law.p.size(); ++i)
    out << i << "," << format_double(law.p[i]) << "\n";
  return out.str();
}

std::string law_csv(const RootLaw& law, const std::vector<double>& std_error) {
  std::ostringstream out;
  out << kCsvSchema << "spin,prob,std_error\n";
  for (std::size_t i = 0; i < law.p.size(); ++i)
    out << i << "," << format_double(law.p[i]) << ","
        << format_double(std_error[i]) << "\n";
  return out.str();
}

std::string partition_csv(const RootLaw& law, const PartitionVector& partition) {
  std::ostringstream out;
  out << kCsvSchema << "spin,prob,logZ_rel\n";
  for (std::size_t i = 0; i < law.p.size(); ++i)
    out << i << "," << format_double(law.p[i]) << ","
        << format_double(partition.logZ[i]) << "\n";
  return out.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  out << kCsvSchema;
  out << "# status=" << to_string(trajectory.status)
      << " levels=" << trajectory.levels << " m=" << format_double(trajectory.m)
      << " M=" << format_double(trajectory.M) << "\n";
  out << "spin,even,odd\n";
  for (std::size_t i = 0; i < trajectory.even_limit.p.size(); ++i)
    out << i << "," << format_double(trajectory.even_limit.p[i]) << ","
        << format_double(trajectory.odd_limit.p[i]) << "\n";
  return out.str();
}

std::string fixed_points_csv(const FixedPointSet& set) {
  std::ostringstream out;
  out << kCsvSchema << "x,deriv,stability\n";
  for (const FixedPoint& p : set.points)
    out << format_double(p.value) << "," << format_double(p.map_deriv) << ","
        << to_string(p.stability) << "\n";
  return out.str();
}

namespace {

void phase_point_rows(std::ostringstream& out,
                      const std::vector<PhasePoint>& points) {
  out << "lambda,delta,coexists,m,M,iterations\n";
  for (const PhasePoint& p : points)
    out << format_double(p.lambda) << "," << format_double(p.delta) << ","
        << csv_bool(p.coexists) << "," << format_double(p.m) << ","
        << format_double(p.M) << "," << p.iterations << "\n";
}

}  // namespace

std::string scan_csv(const std::vector<PhasePoint>& points) {
  std::ostringstream out;
  out << kCsvSchema;
  phase_point_rows(out, points);
  return out.str();
}

std::string critical_csv(const CriticalSearch& search) {
  std::ostringstream out;
  out << kCsvSchema;
  out << "# lambda_cr_lo=" << format_double(search.lambda_lo)
      << " lambda_cr_hi=" << format_double(search.lambda_hi)
      << " bracket_valid=" << csv_bool(search.bracket_valid)
      << " delta_above=" << format_double(search.delta_above) << "\n";
  phase_point_rows(out, search.probes);
  return out.str();
}

std::string order_csv(const OrderResult& result) {
  std::ostringstream out;
  out << kCsvSchema;
  out << "# order=" << to_string(result.order)
      << " jump=" << format_double(result.jump_estimate)
      << " fitted_power=" << format_double(result.fitted_power) << "\n";
  phase_point_rows(out, result.probes);
  return out.str();
}

std::string window_csv(const WindowResult& result) {
  std::ostringstream out;
  out << kCsvSchema;
  out << "# all_match=" << csv_bool(result.all_match)
      << " x_low_seed=" << format_double(result.x_low_seed)
      << " x_high_seed=" << format_double(result.x_high_seed) << "\n";
  out << "gamma,lambda,expect_coexist,delta,coexists,matches\n";
  for (const WindowProbe& p : result.probes)
    out << format_double(p.gamma) << "," << format_double(p.lambda) << ","
        << csv_bool(p.expect_coexist) << "," << format_double(p.outcome.delta)
        << "," << csv_bool(p.outcome.coexists) << "," << csv_bool(p.matches)
        << "\n";
  return out.str();
}

std::string loss_csv(const LossStats& stats) {
  std::ostringstream out;
  out << kCsvSchema;
  out << "# seed=" << stats.seed << " events=" << stats.events
      << " total_time=" << format_double(stats.total_time) << "\n";
  out << "node,calls,time_fraction,blocking_fraction\n";
  for (std::size_t v = 0; v < stats.node_occupancy.size(); ++v)
    for (std::size_t k = 0; k < stats.node_occupancy[v].size(); ++k)
      out << v << "," << k << "," << format_double(stats.node_occupancy[v][k])
          << "," << format_double(stats.blocking_fraction(static_cast<int>(v)))
          << "\n";
  return out.str();
}

}  // namespace hardcore::io
