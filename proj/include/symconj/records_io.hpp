#pragma once

// CSV output for work-precision records and energy time series. Every file
// starts with '#' comment lines carrying the resolved run configuration.

#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symconj/analysis.hpp"
#include "symconj/table_io.hpp"

namespace symconj {

inline constexpr const char* kRecordHeader =
    "method,kind,n,k,h,steps,serial_evals,effective_evals,log2_threads,energy_mean_rel,final_state_rel,"
    "symmetry_defect,symplecticity_defect,status";

namespace detail {

inline std::string csv_optional(const std::optional<double>& v) { return v ? format_g17(*v) : std::string(); }

/// Commas and newlines would break the single-line row format.
inline std::string csv_text(std::string s) {
    for (auto& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

}  // namespace detail

inline void write_comment_header(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << "# " << l << '\n';
}

inline void write_records_csv(std::ostream& os, const std::vector<WorkPrecisionRecord>& records,
                              const std::vector<std::string>& comments = {}) {
    write_comment_header(os, comments);
    os << kRecordHeader << '\n';
    for (const auto& r : records) {
        os << detail::csv_text(r.method) << ',' << detail::csv_text(r.kind) << ',' << r.n << ',' << r.k << ','
           << format_g17(r.h) << ',' << r.steps << ',' << r.serial_evals << ',' << r.effective_evals << ','
           << r.log2_threads << ',' << detail::csv_optional(r.energy_mean_rel) << ','
           << detail::csv_optional(r.final_state_rel) << ',' << detail::csv_optional(r.symmetry_defect) << ','
           << detail::csv_optional(r.symplecticity_defect) << ',' << detail::csv_text(r.status) << '\n';
    }
}

struct EnergySeries {
    std::string method;
    double h = 0.0;
    std::vector<double> energies;  // after steps 1, 2, ...
};

/// Rows method,t,energy_rel_error; every `stride`-th step plus the last.
inline void write_energy_series_csv(std::ostream& os, const std::vector<EnergySeries>& series, double h0,
                                    std::size_t stride, const std::vector<std::string>& comments = {}) {
    if (stride == 0) stride = 1;
    write_comment_header(os, comments);
    os << "method,t,energy_rel_error\n";
    for (const auto& s : series) {
        const std::size_t n = s.energies.size();
        for (std::size_t i = 0; i < n; ++i) {
            if ((i + 1) % stride != 0 && i + 1 != n) continue;
            const double rel = std::abs(s.energies[i] - h0) / std::abs(h0);
            os << detail::csv_text(s.method) << ',' << format_g17(static_cast<double>(i + 1) * s.h) << ','
               << format_g17(rel) << '\n';
        }
    }
}

/// Rows x,re,im of a grid state.
inline void write_grid_csv(std::ostream& os, std::span<const double> x, std::span<const Complex> u,
                           const std::vector<std::string>& comments = {}) {
    write_comment_header(os, comments);
    os << "x,re,im\n";
    for (std::size_t j = 0; j < u.size(); ++j)
        os << format_g17(x[j]) << ',' << format_g17(u[j].real()) << ',' << format_g17(u[j].imag()) << '\n';
}

}  // namespace symconj
