#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfslab {

/// Fixed formatting for all persisted reals: 17 significant digits,
/// C-locale '.' separator, so reruns are byte-identical.
inline std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

/// One measured case of an inequality experiment. `anchor` names the
/// inequality the row checks (e.g. "young-convolution-bound").
struct CaseRow {
    std::string suite;
    long case_id = 0;
    std::string params;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    bool pass = true;
    std::string anchor;
};

struct Aggregate {
    long count = 0;
    long violations = 0;
    double empirical_sup = 0.0;
    std::optional<double> refinement_delta;
};

struct ExperimentReport {
    std::string suite;
    std::vector<CaseRow> rows;
    Aggregate aggregate;
    std::vector<std::string> notes;
    std::optional<double> ceiling;

    void add(CaseRow row) {
        aggregate.count += 1;
        if (!row.pass) aggregate.violations += 1;
        if (std::isfinite(row.ratio))
            aggregate.empirical_sup = std::max(aggregate.empirical_sup, row.ratio);
        rows.push_back(std::move(row));
    }

    void merge(const ExperimentReport& other) {
        for (const auto& r : other.rows) rows.push_back(r);
        aggregate.count += other.aggregate.count;
        aggregate.violations += other.aggregate.violations;
        aggregate.empirical_sup =
            std::max(aggregate.empirical_sup, other.aggregate.empirical_sup);
        for (const auto& n : other.notes) notes.push_back(n);
    }

    bool passed() const {
        if (aggregate.violations != 0) return false;
        if (ceiling && aggregate.empirical_sup > *ceiling) return false;
        return true;
    }
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace detail

/// Fixed row schema: suite, case_id, params, lhs, rhs, ratio, pass, anchor.
/// LF line endings; rows ordered by case_id.
inline void write_cases_csv(const std::string& path, const ExperimentReport& rep) {
    std::vector<const CaseRow*> ordered;
    ordered.reserve(rep.rows.size());
    for (const auto& r : rep.rows) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(), [](const CaseRow* a, const CaseRow* b) {
        if (a->suite != b->suite) return a->suite < b->suite;
        return a->case_id < b->case_id;
    });
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open CSV output: " + path);
    os << "suite,case_id,params,lhs,rhs,ratio,pass,anchor\n";
    for (const auto* r : ordered) {
        os << detail::csv_escape(r->suite) << ',' << r->case_id << ','
           << detail::csv_escape(r->params) << ',' << fmt_real(r->lhs) << ','
           << fmt_real(r->rhs) << ',' << fmt_real(r->ratio) << ','
           << (r->pass ? "true" : "false") << ',' << detail::csv_escape(r->anchor) << '\n';
    }
}

}  // namespace bfslab
