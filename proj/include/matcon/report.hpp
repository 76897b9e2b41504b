#ifndef MATCON_REPORT_HPP
#define MATCON_REPORT_HPP

#include "matcon/bounds.hpp"
#include "matcon/verification.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace matcon {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Shortest text that round-trips the double ("%.17g").
std::string format_double(double x);

/// Columns: scenario,x,replicates,exceed_count,emp_prob,upper_cl,cap,verdict
std::string tail_csv(const std::vector<TailExperiment>& experiments);

/// Columns: scenario,check,xi,replicates,mean,se,cap,verdict
std::string supermartingale_csv(const std::string& scenario, const std::string& check,
                                const std::vector<SupermartingaleCheck>& checks);

/// Columns: check,param,trials,failures,worst_margin,verdict
std::string lemma_csv(const std::vector<std::pair<std::string, LemmaCheck>>& checks,
                      const std::vector<std::pair<std::string, DeviationCheck>>& deviation);

nlohmann::json sym_to_json(const SymMatrixXd& s);

/// VarianceReport plus the tail thresholds and caps at each x.
nlohmann::json variance_report_json(const ScenarioConfig& scenario, const VarianceReport& report,
                                    const TailRule& rule, const std::vector<double>& x_values);

nlohmann::json tail_json(const TailExperiment& e);
nlohmann::json supermartingale_json(const SupermartingaleCheck& c);
nlohmann::json compensator_json(const CompensatorSeries& c);
nlohmann::json variance_consistency_json(const VarianceConsistency& c);

const char* verdict(bool pass);

} // namespace matcon

#endif
