#include "matcon/report.hpp"

#include "matcon/scenario_io.hpp"

#include <cstdio>

namespace matcon {

using nlohmann::json;

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string tail_csv(const std::vector<TailExperiment>& experiments)
{
    std::string out = "scenario,x,replicates,exceed_count,emp_prob,upper_cl,cap,verdict\n";
    for (const auto& e : experiments)
        for (const auto& r : e.rows)
            out += e.scenario + "," + format_double(r.x) + "," + std::to_string(r.replicates) + "," +
                   std::to_string(r.exceed_count) + "," + format_double(r.emp_prob) + "," +
                   format_double(r.upper_cl) + "," + format_double(r.cap) + "," + verdict(r.pass) + "\n";
    return out;
}

std::string supermartingale_csv(const std::string& scenario, const std::string& check,
                                const std::vector<SupermartingaleCheck>& checks)
{
    std::string out = "scenario,check,xi,replicates,mean,se,cap,verdict\n";
    for (const auto& c : checks)
        out += scenario + "," + check + "," + format_double(c.xi) + "," + std::to_string(c.values.size()) + "," +
               format_double(c.mean) + "," + format_double(c.se) + "," + format_double(c.cap) + "," +
               verdict(c.pass) + "\n";
    return out;
}

std::string lemma_csv(const std::vector<std::pair<std::string, LemmaCheck>>& checks,
                      const std::vector<std::pair<std::string, DeviationCheck>>& deviation)
{
    std::string out = "check,param,trials,failures,worst_margin,verdict\n";
    for (const auto& [param, c] : checks)
        out += c.name + "," + param + "," + std::to_string(c.trials) + "," + std::to_string(c.failures) + "," +
               format_double(c.worst_margin) + "," + verdict(c.pass()) + "\n";
    for (const auto& [sampler, d] : deviation)
        for (const auto& r : d.rows)
            out += "deviation," + sampler + ":x=" + format_double(r.x) + ",1," + (r.pass ? "0" : "1") + "," +
                   format_double(r.bound - r.upper_cl) + "," + verdict(r.pass) + "\n";
    return out;
}

json sym_to_json(const SymMatrixXd& s) { return matrix_to_json(s.matrix()); }

json variance_report_json(const ScenarioConfig& scenario, const VarianceReport& report, const TailRule& rule,
                          const std::vector<double>& x_values)
{
    json thresholds = json::array();
    for (double x : x_values)
        thresholds.push_back({{"x", x}, {"threshold", rule.threshold(x)}, {"cap", rule.cap(x)}});
    return {{"scenario", scenario.name},
            {"V", sym_to_json(report.v)},
            {"sigma_sq", report.sigma_sq},
            {"b_t", report.b_t},
            {"block_norms", {report.block_norms.first, report.block_norms.second}},
            {"integrability", sym_to_json(report.integrability)},
            {"rule", rule.label},
            {"thresholds", thresholds}};
}

json tail_json(const TailExperiment& e)
{
    json rows = json::array();
    for (const auto& r : e.rows)
        rows.push_back({{"x", r.x},
                        {"threshold", r.threshold},
                        {"replicates", r.replicates},
                        {"exceed_count", r.exceed_count},
                        {"emp_prob", r.emp_prob},
                        {"upper_cl", r.upper_cl},
                        {"cap", r.cap},
                        {"verdict", verdict(r.pass)}});
    return {{"scenario", e.scenario}, {"rule", e.rule}, {"seed", e.seed}, {"rows", rows},
            {"verdict", verdict(e.pass())}};
}

json supermartingale_json(const SupermartingaleCheck& c)
{
    return {{"xi", c.xi},          {"replicates", c.values.size()}, {"mean", c.mean},
            {"se", c.se},          {"cap", c.cap},                  {"verdict", verdict(c.pass)}};
}

json compensator_json(const CompensatorSeries& c)
{
    return {{"K", c.K},
            {"xi", c.xi},
            {"lambda_hat", sym_to_json(c.lambda_hat)},
            {"rhs", sym_to_json(c.rhs)},
            {"truncation_tail", c.tail},
            {"tolerance", c.tolerance},
            {"margin", c.margin},
            {"verdict", verdict(c.pass)}};
}

json variance_consistency_json(const VarianceConsistency& c)
{
    return {{"V", sym_to_json(c.v)},
            {"mean_top", sym_to_json(c.mean_top)},
            {"mean_bottom", sym_to_json(c.mean_bottom)},
            {"worst_ratio", c.worst_ratio},
            {"sigma_sq", c.sigma_sq},
            {"sigma_sq_mc", c.sigma_sq_mc},
            {"sigma_sq_tol", c.sigma_sq_tol},
            {"verdict", verdict(c.pass())}};
}

} // namespace matcon
