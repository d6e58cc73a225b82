#include "calgeo/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace calgeo {

nlohmann::json Report::to_json() const {
    return {{"check_name", check_name}, {"lhs", lhs},
            {"rhs", rhs},               {"bound", bound},
            {"tolerance", tolerance},   {"pass", pass}};
}

Report Report::from_json(const nlohmann::json& j) {
    Report r;
    r.check_name = j.at("check_name").get<std::string>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.bound = j.at("bound").get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.pass = j.at("pass").get<bool>();
    return r;
}

Report Report::relative(std::string name, double lhs, double rhs, double tol,
                        double floor) {
    Report r;
    r.check_name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    const double scale = std::max({std::abs(lhs), std::abs(rhs), floor});
    r.bound = std::abs(lhs - rhs) / scale;
    r.pass = std::isfinite(r.bound) && r.bound <= tol;
    return r;
}

Report Report::leq(std::string name, double lhs, double rhs, double tol) {
    Report r;
    r.check_name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = tol;
    r.bound = lhs - rhs;
    r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tol;
    return r;
}

Report Report::boolean(std::string name, bool ok) {
    Report r;
    r.check_name = std::move(name);
    r.lhs = ok ? 1.0 : 0.0;
    r.rhs = 1.0;
    r.pass = ok;
    return r;
}

nlohmann::json reports_to_json(const std::vector<Report>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    return arr;
}

bool all_pass(const std::vector<Report>& reports) {
    return std::all_of(reports.begin(), reports.end(),
                       [](const Report& r) { return r.pass; });
}

std::string format_reports(const std::vector<Report>& reports) {
    std::ostringstream out;
    for (const auto& r : reports) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%s  %-48s lhs=%.10g rhs=%.10g gap=%.3g tol=%.3g\n",
                      r.pass ? "PASS" : "FAIL", r.check_name.c_str(), r.lhs,
                      r.rhs, r.bound, r.tolerance);
        out << buf;
    }
    return out.str();
}

} // namespace calgeo
