#pragma once

#include "sdfsim/sim.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sdfsim {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Header plus rows of a comma-separated table (no quoting; fields never contain commas).
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column, or throws Error naming the missing column.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string &path);
void write_csv(std::ostream &out, const CsvTable &table);

std::string read_text_file(const std::string &path);

/**
 * Columnar trial log: '#'-prefixed metadata lines, then a header
 * "step,x_0..x_{N-1},x_hat_0..,b_hat_0.." and one row per step.
 */
void write_trial_log(std::ostream &out, const TrialLog &log);

/// Reads what write_trial_log wrote. Config fields other than the seed are not restored.
TrialLog read_trial_log(std::string_view text);

} // namespace sdfsim
