#include "semguide/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "semguide/errors.hpp"

namespace semguide {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_fixed_uint(const char* s, int len, long& out) {
    out = 0;
    for (int i = 0; i < len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

}  // namespace

bool parse_iso8601(const std::string& text, std::int64_t& epoch_seconds) {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    const char* s = text.c_str();
    const std::size_t n = text.size();
    if (n < 16) return false;
    long year, month, day, hour, minute, second = 0;
    if (!parse_fixed_uint(s, 4, year) || s[4] != '-') return false;
    if (!parse_fixed_uint(s + 5, 2, month) || s[7] != '-') return false;
    if (!parse_fixed_uint(s + 8, 2, day)) return false;
    if (s[10] != 'T' && s[10] != ' ') return false;
    if (!parse_fixed_uint(s + 11, 2, hour) || s[13] != ':') return false;
    if (!parse_fixed_uint(s + 14, 2, minute)) return false;
    std::size_t pos = 16;
    if (pos < n && s[pos] == ':') {
        if (pos + 3 > n || !parse_fixed_uint(s + pos + 1, 2, second)) return false;
        pos += 3;
    }
    if (pos < n && s[pos] == 'Z') pos += 1;
    if (pos != n) return false;
    if (month < 1 || month > 12 || day < 1 || day > 31) return false;
    if (hour > 23 || minute > 59 || second > 60) return false;
    epoch_seconds = days_from_civil(year, static_cast<unsigned>(month),
                                    static_cast<unsigned>(day)) *
                        86400 +
                    hour * 3600 + minute * 60 + second;
    return true;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

namespace {

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

}  // namespace

RawSeries load_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("load_csv: cannot open " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("load_csv: empty file " + path);
    const auto header = split_csv_line(header_line);

    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw DataError("load_csv: missing column '" + name + "' in " + path);
    };

    const std::size_t ts_col = column_index(schema.timestamp_column);
    std::vector<std::size_t> target_cols, cov_cols;
    for (const auto& c : schema.target_columns) target_cols.push_back(column_index(c));
    for (const auto& c : schema.covariate_columns) cov_cols.push_back(column_index(c));
    if (target_cols.empty()) throw DataError("load_csv: no target columns mapped");

    struct Row {
        std::int64_t ts;
        std::vector<double> targets, covs;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::vector<RejectedRow> rejected;

    std::string line;
    std::size_t line_number = 1;  // header was line 1
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            rejected.push_back({line_number, "field count mismatch"});
            continue;
        }
        Row row;
        row.line = line_number;
        if (!parse_iso8601(fields[ts_col], row.ts)) {
            rejected.push_back({line_number, "unparseable timestamp '" + fields[ts_col] + "'"});
            continue;
        }
        bool ok = true;
        for (std::size_t c : target_cols) {
            double v;
            if (!parse_double(fields[c], v)) {
                rejected.push_back({line_number, "unparseable value '" + fields[c] +
                                                     "' in column " + header[c]});
                ok = false;
                break;
            }
            row.targets.push_back(v);
        }
        if (!ok) continue;
        for (std::size_t c : cov_cols) {
            double v;
            if (!parse_double(fields[c], v)) {
                rejected.push_back({line_number, "unparseable value '" + fields[c] +
                                                     "' in column " + header[c]});
                ok = false;
                break;
            }
            row.covs.push_back(v);
        }
        if (!ok) continue;
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw DataError("load_csv: no parseable data rows in " + path);

    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].ts <= rows[i - 1].ts) {
            std::ostringstream os;
            os << "load_csv: non-monotone timestamp at line " << rows[i].line
               << " (not after line " << rows[i - 1].line << ")";
            throw DataError(os.str());
        }
    }

    RawSeries series;
    const std::size_t n = rows.size();
    series.timestamps.reserve(n);
    series.targets = TimeMatrix::zeros(n, target_cols.size());
    series.covariates = TimeMatrix::zeros(n, cov_cols.size());
    for (std::size_t i = 0; i < n; ++i) {
        series.timestamps.push_back(rows[i].ts);
        for (std::size_t c = 0; c < target_cols.size(); ++c) {
            series.targets.at(i, c) = rows[i].targets[c];
        }
        for (std::size_t c = 0; c < cov_cols.size(); ++c) {
            series.covariates.at(i, c) = rows[i].covs[c];
        }
    }
    series.rejected = std::move(rejected);
    return series;
}

}  // namespace semguide
