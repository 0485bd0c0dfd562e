#include "kirchhoff/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace kirchhoff::io {

namespace {

using nlohmann::json;

template <typename T>
json optional_json(const std::optional<T>& value) {
    return value ? json(*value) : json(nullptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

json to_json(const PowerModel& model) { return {{"m", model.m}, {"p", model.p}}; }

json to_json(const ValidationReport<double>& report) {
    return {{"N", report.N},
            {"m", report.m},
            {"zeta0", report.zeta0},
            {"critical_power", report.critical_power},
            {"g1", report.g1},
            {"g2", report.g2},
            {"g3", report.g3},
            {"g4", report.g4},
            {"accepted", report.accepted()},
            {"diagnostics", report.diagnostics}};
}

json to_json(const Profile& profile) {
    return {{"N", profile.N},
            {"m", profile.model.m},
            {"p", profile.model.p},
            {"xi", profile.xi},
            {"nodes", profile.nodes},
            {"K", profile.K},
            {"GInt", profile.GInt},
            {"pohozaev_residual", check_pohozaev_scalar(profile)},
            {"r_cut", profile.r_max()},
            {"grid_points", profile.r.size()},
            {"bisections", profile.bisections},
            {"inconclusive_shots", profile.inconclusive_shots}};
}

json to_json(const KirchhoffProblem<double>& problem, double K, const ScalingRoots<double>& roots) {
    return {{"N", problem.N},
            {"a", problem.a},
            {"b", problem.b},
            {"K", K},
            {"regime", to_string(roots.regime)},
            {"roots", roots.roots},
            {"t_star", optional_json(roots.t_star)},
            {"f_min", optional_json(roots.f_min)},
            {"a_max", optional_json(roots.a_max)}};
}

json to_json(const ActionReport<double>& report) {
    return {{"I_definition", report.I_definition},
            {"I_definition_identity", report.I_definition_identity},
            {"I_reduced", report.I_reduced},
            {"I_func", report.I_func},
            {"pohozaev_residual", report.pohozaev_residual_kirchhoff},
            {"pde_residual", report.pde_residual_sup},
            {"t", report.t},
            {"K_u", report.K_u},
            {"K_u_quadrature", report.K_u_quadrature},
            {"scaling_identity_residual", report.scaling_identity_residual},
            {"root_identity_residual", report.root_identity_residual},
            {"definition_gap", report.definition_gap},
            {"closed_form_gap", report.closed_form_gap},
            {"gates",
             {{"action", report.action_ok},
              {"pohozaev", report.pohozaev_ok},
              {"pde", report.pde_ok},
              {"identities", report.identities_ok}}},
            {"pass", report.passes()}};
}

json to_json(const ExistenceReport<double>& report) {
    return {{"N", report.N},
            {"exists", report.exists},
            {"regime", to_string(report.regime)},
            {"branches", report.branches},
            {"bK", report.bK},
            {"a_max", optional_json(report.a_max)},
            {"margin", optional_json(report.margin)},
            {"t_star", optional_json(report.t_star)},
            {"note", report.note}};
}

json to_json(const ComparisonReport<double>& report) {
    return {{"t1", report.t1},
            {"t2", report.t2},
            {"I1", report.I1},
            {"I2", report.I2},
            {"t2_less_than_t1", report.t_ordered},
            {"I1_less_than_I2", report.action_ordered},
            {"pass", report.holds()}};
}

json to_json(const NonnegativityReport<double>& report) {
    return {{"trials", report.trials},
            {"seed", report.seed},
            {"a_max", report.a_max},
            {"above_threshold", report.above_threshold},
            {"min_action", report.min_action},
            {"argmin_alpha", report.argmin_alpha},
            {"argmin_sigma", report.argmin_sigma},
            {"pass", report.pass}};
}

void write_profile_csv(std::ostream& out, const Eigen::VectorXd& r, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& dv) {
    out << "r,v,dv\n";
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        out << format_double(r(i)) << ',' << format_double(v(i)) << ',' << format_double(dv(i)) << '\n';
    }
}

void write_profile_csv(const std::filesystem::path& path, const Profile& profile) {
    auto out = open_for_write(path);
    write_profile_csv(out, profile.r, profile.v, profile.dv);
}

void write_profile_csv(const std::filesystem::path& path, const ScaledProfile<PowerModel>& u) {
    auto out = open_for_write(path);
    write_profile_csv(out, u.s, u.u, u.du);
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

}  // namespace kirchhoff::io
