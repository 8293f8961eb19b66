#include "insider/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>

#include "insider/errors.hpp"

namespace insider {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void reject_unknown(const json& doc, const std::set<std::string>& allowed, const std::string& where) {
    if (!doc.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& item : doc.items())
        if (!allowed.count(item.key())) throw ValidationError("unknown field '" + item.key() + "' in " + where);
}

std::vector<double> number_array(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_array()) throw ValidationError(std::string("missing array '") + key + "'");
    std::vector<double> values;
    for (const auto& v : doc.at(key)) {
        if (!v.is_number()) throw ValidationError(std::string("non-numeric entry in '") + key + "'");
        values.push_back(v.get<double>());
    }
    return values;
}

// Number, or one of the strings "inf", "+inf", "-inf".
double extended_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ValidationError("field '" + key + "' must be a number or \"inf\"/\"-inf\"");
}

json extended_to_json(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return v;
}

// JSON numbers for finite values, null otherwise.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

json to_json(const CoefficientSet& coeffs) {
    auto as_vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    return {{"schema_version", kCoefficientSchemaVersion},
            {"breakpoints", as_vec(coeffs.breakpoints())},
            {"r", as_vec(coeffs.rate_values())},
            {"b", as_vec(coeffs.drift_values())},
            {"sigma", as_vec(coeffs.volatility_values())}};
}

CoefficientSet coefficients_from_json(const json& doc) {
    reject_unknown(doc, {"schema_version", "breakpoints", "r", "b", "sigma"}, "market");
    if (doc.contains("schema_version")) {
        const auto& v = doc.at("schema_version");
        if (!v.is_number_integer() || v.get<int>() != kCoefficientSchemaVersion)
            throw ValidationError("unsupported market schema_version");
    }
    return CoefficientSet(number_array(doc, "breakpoints"), number_array(doc, "r"), number_array(doc, "b"),
                          number_array(doc, "sigma"));
}

json to_json(const InsiderInfo& info) {
    switch (info.kind()) {
        case InfoKind::Interval:
            return {{"kind", "interval"}, {"p1", info.p1()}, {"p2", extended_to_json(info.p2())}};
        case InfoKind::LowerBound: return {{"kind", "lower_bound"}, {"p1", info.p1()}};
        case InfoKind::UpperBound: return {{"kind", "upper_bound"}, {"p2", info.p2()}};
        case InfoKind::ExactTerminal: return {{"kind", "exact_terminal"}};
    }
    return {};
}

InsiderInfo info_from_json(const json& doc, const CoefficientSet& coeffs, double initial_price) {
    if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string())
        throw ValidationError("info needs a string 'kind'");
    const auto kind = doc.at("kind").get<std::string>();
    auto field = [&](const char* key) {
        if (!doc.contains(key)) throw ValidationError(std::string("info is missing '") + key + "'");
        return extended_number(doc.at(key), key);
    };
    if (kind == "interval") {
        if (doc.contains("c1") || doc.contains("c2")) {
            reject_unknown(doc, {"kind", "c1", "c2"}, "info");
            return interval_from_log_thresholds(coeffs, initial_price, field("c1"), field("c2"));
        }
        reject_unknown(doc, {"kind", "p1", "p2"}, "info");
        return InsiderInfo::interval(field("p1"), field("p2"));
    }
    if (kind == "lower_bound") {
        reject_unknown(doc, {"kind", "p1"}, "info");
        return InsiderInfo::lower_bound(field("p1"));
    }
    if (kind == "upper_bound") {
        reject_unknown(doc, {"kind", "p2"}, "info");
        return InsiderInfo::upper_bound(field("p2"));
    }
    if (kind == "exact_terminal") {
        reject_unknown(doc, {"kind"}, "info");
        return InsiderInfo::exact_terminal();
    }
    throw ValidationError("unknown info kind '" + kind + "'");
}

json to_json(const IntegralIReport& r) {
    auto sub = [](const SubIntegral& s) {
        return json{{"value", s.value},
                    {"event_term", s.event_term},
                    {"complement_term", s.complement_term},
                    {"error", s.error},
                    {"converged", s.converged}};
    };
    return {{"t", r.t},         {"gap", number_or_null(r.gap)}, {"left", sub(r.left)},       {"middle", sub(r.middle)},
            {"right", sub(r.right)}, {"total", r.total()},           {"error", r.error()}, {"converged", r.converged()}};
}

json lemma_summary_json(const LemmaScanReport& r) {
    return {{"sup_integral", number_or_null(r.sup_integral)},
            {"last_octave_growth", number_or_null(r.last_octave_growth)},
            {"max_error", r.max_error},
            {"converged", r.converged},
            {"verdict", r.finite ? "bounded" : "unbounded or unconverged"}};
}

json to_json(const LemmaScanReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json j = to_json(row.integral);
        j["EalphaSq"] = row.e_alpha_sq;
        j["bound_product"] = row.bound_product;
        rows.push_back(j);
    }
    json doc = lemma_summary_json(r);
    doc["rows"] = rows;
    return doc;
}

json to_json(const BoundScanReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"t", row.t},
                        {"EalphaSq", number_or_null(row.e_alpha_sq)},
                        {"bound_product", number_or_null(row.product)},
                        {"running_sup", number_or_null(row.running_sup)},
                        {"err_estimate", row.error},
                        {"converged", row.converged}});
    return {{"k_hat", number_or_null(r.k_hat)},
            {"last_octave_ratio", number_or_null(r.last_octave_ratio)},
            {"bounded", r.bounded},
            {"rows", rows}};
}

json to_json(const ValueReport& r) {
    return {{"horizon", r.horizon},
            {"eps", r.eps},
            {"VF", r.vf},
            {"half_int_alpha_sq", r.half_int_alpha_sq},
            {"VG", r.vg},
            {"value_of_information", r.vg - r.vf},
            {"quadrature_error", r.quadrature_error},
            {"truncation_bound", number_or_null(r.truncation_bound)},
            {"bound_constant_K", number_or_null(r.k_hat)},
            {"last_octave_ratio", number_or_null(r.last_octave_ratio)},
            {"converged", r.converged},
            {"finite", r.finite},
            {"verdict", r.verdict()}};
}

json to_json(const MCReport& r) {
    return {{"strategy", r.strategy},
            {"horizon", r.horizon},
            {"paths", r.paths},
            {"flagged_paths", r.flagged},
            {"mean_log_wealth", r.mean_log_wealth},
            {"std_dev", r.std_dev},
            {"standard_error", r.standard_error},
            {"target_kind", r.target_kind},
            {"target", r.target},
            {"z_score", number_or_null(r.z_score)}};
}

json to_json(const OracleEstimate& e) {
    return {{"t", e.t}, {"mean_alpha_sq", e.mean}, {"standard_error", e.standard_error}, {"paths", e.paths}};
}

json to_json(const MartingaleReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) rows.push_back({{"t", row.t}, {"mean", row.mean}, {"standard_error", row.standard_error}});
    return {{"paths", r.paths},
            {"unconditional_prob", r.unconditional},
            {"l_frequency", r.l_frequency},
            {"l_frequency_se", r.l_frequency_se},
            {"rows", rows}};
}

void write_csv(std::ostream& out, const LemmaScanReport& r) {
    out << kLemmaCsvHeader << '\n';
    for (const auto& row : r.rows) {
        out << format_number(row.integral.t) << ',' << format_number(row.integral.left.value) << ','
            << format_number(row.integral.middle.value) << ',' << format_number(row.integral.right.value) << ','
            << format_number(row.e_alpha_sq) << ',' << format_number(row.bound_product) << ','
            << format_number(row.error) << ',' << (row.converged ? 1 : 0) << '\n';
    }
}

void write_csv(std::ostream& out, const BoundScanReport& r) {
    out << kBoundCsvHeader << '\n';
    for (const auto& row : r.rows) {
        out << format_number(row.t) << ',' << format_number(row.e_alpha_sq) << ',' << format_number(row.product) << ','
            << format_number(row.running_sup) << ',' << format_number(row.error) << ',' << (row.converged ? 1 : 0)
            << '\n';
    }
}

void write_csv(std::ostream& out, const MartingaleReport& r) {
    out << kMartingaleCsvHeader << '\n';
    for (const auto& row : r.rows)
        out << format_number(row.t) << ',' << format_number(row.mean) << ',' << format_number(row.standard_error)
            << '\n';
}

void write_path_csv(std::ostream& out, const MCReport& r) {
    out << kPathCsvHeader << '\n';
    for (const auto& d : r.diagnostics)
        out << d.index << ',' << (d.realized_l ? 1 : 0) << ',' << format_number(d.log_wealth) << '\n';
}

}  // namespace insider
