// JSON and CSV serialization of profiles and reports (double precision).
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "kirchhoff/functional.hpp"
#include "kirchhoff/nonlinearity.hpp"
#include "kirchhoff/radial_shooting.hpp"
#include "kirchhoff/scaling_map.hpp"

namespace kirchhoff::io {

inline constexpr const char* kSchemaVersion = "1.0";

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

nlohmann::json to_json(const PowerModel& model);
nlohmann::json to_json(const ValidationReport<double>& report);
nlohmann::json to_json(const Profile& profile);  // the sidecar schema
nlohmann::json to_json(const KirchhoffProblem<double>& problem, double K, const ScalingRoots<double>& roots);
nlohmann::json to_json(const ActionReport<double>& report);
nlohmann::json to_json(const ExistenceReport<double>& report);
nlohmann::json to_json(const ComparisonReport<double>& report);
nlohmann::json to_json(const NonnegativityReport<double>& report);

/// "r,v,dv" rows, full precision.
void write_profile_csv(std::ostream& out, const Eigen::VectorXd& r, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& dv);
void write_profile_csv(const std::filesystem::path& path, const Profile& profile);
void write_profile_csv(const std::filesystem::path& path, const ScaledProfile<PowerModel>& u);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace kirchhoff::io
