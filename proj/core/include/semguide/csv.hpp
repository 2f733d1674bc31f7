#pragma once

#include <string>
#include <vector>

#include "semguide/data.hpp"

namespace semguide {

/// Column mapping for CSV ingestion. All named columns must exist in the
/// header; timestamps are ISO-8601 (YYYY-MM-DDTHH:MM[:SS], optional 'Z').
struct CsvSchema {
    std::string timestamp_column;
    std::vector<std::string> target_columns;
    std::vector<std::string> covariate_columns;
};

/// Reads a header CSV into a RawSeries. Rows with unparseable values are
/// rejected and reported with their line numbers; non-monotone timestamps
/// are a hard error naming the first offending row.
RawSeries load_csv(const std::string& path, const CsvSchema& schema);

std::vector<std::string> split_csv_line(const std::string& line);

/// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (a space also accepted as separator)
/// into seconds since the Unix epoch. Returns false on malformed input.
bool parse_iso8601(const std::string& text, std::int64_t& epoch_seconds);

/// Shortest round-trip formatting for doubles ("%.17g" fallback), used by all
/// CSV emitters so reruns are byte-identical.
std::string format_double(double v);

}  // namespace semguide
