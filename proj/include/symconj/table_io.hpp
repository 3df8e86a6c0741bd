#pragma once

// JSON export/import of composition tables:
//   {"kind", "n", "k", "conjugate_closure",
//    "rows": [{"weight_num", "weight_den", "coeffs": [[re, im], ...]}]}
// Floats are written with 17 significant digits so a round trip is exact.

#include <cstdio>
#include <sstream>
#include <string>

#include <json.hpp>

#include "symconj/coefficients.hpp"

namespace symconj {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void write_complex(std::ostream& os, Complex c) {
    os << '[' << format_g17(c.real()) << ", " << format_g17(c.imag()) << ']';
}

}  // namespace detail

inline void write_order_report(std::ostream& os, const OrderConditionReport& report, const std::string& indent) {
    os << "{\n" << indent << "  \"sums\": [\n";
    for (std::size_t i = 0; i < report.sums.size(); ++i) {
        const auto& e = report.sums[i];
        os << indent << "    {\"label\": \"" << e.label << "\", \"power\": " << e.power << ", \"value\": ";
        detail::write_complex(os, e.value);
        os << ", \"required\": " << (e.required ? "true" : "false") << '}';
        os << (i + 1 < report.sums.size() ? ",\n" : "\n");
    }
    os << indent << "  ],\n" << indent << "  \"max_magnitude\": " << format_g17(report.max_magnitude) << '\n'
       << indent << '}';
}

/// Serializes a table; when `report` is given it is appended as
/// "order_conditions".
inline std::string table_to_json(const CompositionTable& table, const OrderConditionReport* report = nullptr) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"kind\": \"" << to_string(table.kind) << "\",\n";
    os << "  \"n\": " << table.n << ",\n";
    os << "  \"k\": " << table.k << ",\n";
    os << "  \"conjugate_closure\": " << (table.conjugate_closure ? "true" : "false") << ",\n";
    if (table.conjectural) os << "  \"conjectural\": true,\n";
    os << "  \"rows\": [\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        os << "    {\"weight_num\": " << row.weight.num << ", \"weight_den\": " << row.weight.den << ", \"coeffs\": [";
        for (std::size_t j = 0; j < row.coefficients.size(); ++j) {
            if (j != 0) os << ", ";
            detail::write_complex(os, row.coefficients[j]);
        }
        os << "]}" << (i + 1 < table.rows.size() ? ",\n" : "\n");
    }
    os << "  ]";
    if (report != nullptr) {
        os << ",\n  \"order_conditions\": ";
        write_order_report(os, *report, "  ");
    }
    os << "\n}\n";
    return os.str();
}

class TableFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline CompositionTable table_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw TableFormatError(std::string("table JSON: ") + e.what());
    }
    try {
        CompositionTable table;
        table.kind = parse_method_kind(doc.at("kind").get<std::string>());
        table.n = doc.at("n").get<int>();
        table.k = doc.at("k").get<int>();
        table.conjugate_closure = doc.at("conjugate_closure").get<bool>();
        table.conjectural = doc.value("conjectural", false);
        for (const auto& jr : doc.at("rows")) {
            CompositionRow row;
            row.weight.num = jr.at("weight_num").get<std::uint64_t>();
            row.weight.den = jr.at("weight_den").get<std::uint64_t>();
            if (row.weight.den == 0 || (row.weight.den & (row.weight.den - 1)) != 0)
                throw TableFormatError("table JSON: weight_den must be a power of two");
            for (const auto& jc : jr.at("coeffs")) {
                if (jc.size() != 2) throw TableFormatError("table JSON: coefficient must be [re, im]");
                row.coefficients.emplace_back(jc[0].get<double>(), jc[1].get<double>());
            }
            row.symmetric_conjugate = detail::is_symmetric_conjugate(row.coefficients);
            table.rows.push_back(std::move(row));
        }
        if (table.rows.empty()) throw TableFormatError("table JSON: no rows");
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw TableFormatError(std::string("table JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw TableFormatError(std::string("table JSON: ") + e.what());
    }
}

}  // namespace symconj
