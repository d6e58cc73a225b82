#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace calgeo {

/// One verification row: a named quantity pair with its bound and verdict.
struct Report {
    std::string check_name;
    double lhs = 0.0;
    double rhs = 0.0;
    double bound = 0.0;      // allowed discrepancy / inequality slack
    double tolerance = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
    static Report from_json(const nlohmann::json& j);

    /// |lhs - rhs| <= tol * max(|lhs|, |rhs|, floor)
    static Report relative(std::string name, double lhs, double rhs, double tol,
                           double floor = 1e-30);
    /// lhs <= rhs + tol
    static Report leq(std::string name, double lhs, double rhs, double tol = 0.0);
    static Report boolean(std::string name, bool ok);
};

nlohmann::json reports_to_json(const std::vector<Report>& reports);
bool all_pass(const std::vector<Report>& reports);

/// One line per report, aligned, "PASS"/"FAIL" prefixed.
std::string format_reports(const std::vector<Report>& reports);

} // namespace calgeo
