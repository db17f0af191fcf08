#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "hardcore/criticality.hpp"
#include "hardcore/dynamics.hpp"
#include "hardcore/exact_tree.hpp"
#include "hardcore/loss_network.hpp"
#include "hardcore/recursion.hpp"
#include "hardcore/scalar_maps.hpp"

// Serialization helpers shared by the command-line tool and the tests.  JSON
// uses insertion-ordered objects and CSV a fixed versioned schema so that
// identical runs produce byte-identical output.
namespace hardcore::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kCsvSchema = "# schema=hardcore-tree/v1\n";

// Shortest decimal that round-trips; "inf"/"-inf"/"nan" spelled out.
std::string format_double(double x);

// Finite values serialize as numbers, non-finite ones as strings (JSON has
// no inf literal).
json json_number(double x);

const char* to_string(IterStatus status);
const char* to_string(Stability stability);
const char* to_string(TransitionOrder order);

json to_json(const RootLaw& law);
json to_json(const FixedPoint& point);
json to_json(const FixedPointSet& set);
json to_json(const SShapeReport& report);
json to_json(const Trajectory& trajectory);
json to_json(const PhasePoint& point);
json to_json(const CriticalSearch& search);
json to_json(const OrderResult& result);
json to_json(const WindowProbe& probe);
json to_json(const WindowResult& result);
json to_json(const SampleResult& result);
json to_json(const LossStats& stats, const LossGraph& graph);

std::string law_csv(const RootLaw& law);
std::string law_csv(const RootLaw& law, const std::vector<double>& std_error);
std::string partition_csv(const RootLaw& law, const PartitionVector& partition);
std::string trajectory_csv(const Trajectory& trajectory);
std::string fixed_points_csv(const FixedPointSet& set);
std::string scan_csv(const std::vector<PhasePoint>& points);
std::string critical_csv(const CriticalSearch& search);
std::string order_csv(const OrderResult& result);
std::string window_csv(const WindowResult& result);
std::string loss_csv(const LossStats& stats);

}  // namespace hardcore::io
