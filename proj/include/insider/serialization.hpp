#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "insider/market_model.hpp"
#include "insider/quadrature.hpp"
#include "insider/simulation.hpp"

namespace insider {

inline constexpr int kCoefficientSchemaVersion = 1;

// {"schema_version":1,"breakpoints":[...],"r":[...],"b":[...],"sigma":[...]}
// Unknown keys are rejected; schema_version may be omitted on input.
nlohmann::json to_json(const CoefficientSet& coeffs);
CoefficientSet coefficients_from_json(const nlohmann::json& doc);

// {"kind":"interval","p1":..,"p2":..} | {"kind":"lower_bound","p1":..} |
// {"kind":"upper_bound","p2":..} | {"kind":"exact_terminal"}.
// Interval thresholds may instead be given on M(1) as "c1"/"c2", which needs
// the coefficients and the initial price. Unbounded sides: p1 = 0, p2 = "inf",
// c1 = "-inf", c2 = "inf".
nlohmann::json to_json(const InsiderInfo& info);
InsiderInfo info_from_json(const nlohmann::json& doc, const CoefficientSet& coeffs, double initial_price);

nlohmann::json to_json(const IntegralIReport& report);
nlohmann::json to_json(const LemmaScanReport& report);
nlohmann::json lemma_summary_json(const LemmaScanReport& report);
nlohmann::json to_json(const BoundScanReport& report);
nlohmann::json to_json(const ValueReport& report);
nlohmann::json to_json(const MCReport& report);
nlohmann::json to_json(const OracleEstimate& estimate);
nlohmann::json to_json(const MartingaleReport& report);

// CSV writers; '.' decimal separator, header row first, 17 significant digits.
inline constexpr const char* kLemmaCsvHeader =
    "t,integralI_left,integralI_mid,integralI_right,EalphaSq,bound_product,err_estimate,converged";
inline constexpr const char* kBoundCsvHeader = "t,EalphaSq,bound_product,running_sup,err_estimate,converged";
inline constexpr const char* kMartingaleCsvHeader = "t,mean_cond_prob,standard_error";
inline constexpr const char* kPathCsvHeader = "path_index,realized_L,terminal_log_wealth";

void write_csv(std::ostream& out, const LemmaScanReport& report);
void write_csv(std::ostream& out, const BoundScanReport& report);
void write_csv(std::ostream& out, const MartingaleReport& report);
void write_path_csv(std::ostream& out, const MCReport& report);

std::string format_number(double value);

}  // namespace insider
