#include "sdfsim/io.hpp"

#include "sdfsim/error.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sdfsim {

namespace {

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto end = line.find(sep, start);
        out.emplace_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos)
            break;
        start = end + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line)
{
    T value{};
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError("invalid number '" + std::string(text) + "'", line);
    return value;
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size())
    {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        pos = end + 1;
    }
    return lines;
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw Error("missing column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const
{
    for (const auto &h : header)
        if (h == name)
            return true;
    return false;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    const auto lines = lines_of(text);
    std::size_t line_no = 0;
    for (auto line : lines)
    {
        ++line_no;
        if (line.empty())
            continue;
        auto fields = split(line, ',');
        if (table.header.empty())
        {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        table.rows.push_back(std::move(fields));
    }
    return table;
}

std::string read_text_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CsvTable read_csv_file(const std::string &path) { return parse_csv(read_text_file(path)); }

void write_csv(std::ostream &out, const CsvTable &table)
{
    auto write_row = [&out](const std::vector<std::string> &row) {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
                out << ',';
            out << row[i];
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto &row : table.rows)
        write_row(row);
}

void write_trial_log(std::ostream &out, const TrialLog &log)
{
    out << "# sdfsim trial log\n";
    out << "# num_robots=" << log.num_robots << '\n';
    out << "# steps=" << log.steps << '\n';
    out << "# seed=" << log.config.seed << '\n';
    out << "# realized_fill_ratio=" << format_double(log.realized_fill_ratio) << '\n';
    out << "# flawed=";
    for (std::size_t i = 0; i < log.flawed.size(); ++i)
        out << (log.flawed[i] ? '1' : '0');
    out << '\n';

    out << "step";
    for (const char *prefix : {"x_", "x_hat_", "b_hat_"})
        for (std::size_t i = 0; i < log.num_robots; ++i)
            out << ',' << prefix << i;
    out << '\n';

    for (std::size_t k = 0; k < log.steps; ++k)
    {
        out << k;
        for (const auto *series : {&log.x, &log.x_hat, &log.b_hat})
            for (std::size_t i = 0; i < log.num_robots; ++i)
                out << ',' << format_double((*series)[i * log.steps + k]);
        out << '\n';
    }
}

TrialLog read_trial_log(std::string_view text)
{
    TrialLog log;
    bool have_n = false;
    bool have_steps = false;
    bool have_header = false;
    std::size_t k = 0;
    std::size_t line_no = 0;

    for (auto line : lines_of(text))
    {
        ++line_no;
        if (line.empty())
            continue;
        if (line.front() == '#')
        {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                continue;
            auto key = line.substr(1, eq - 1);
            while (!key.empty() && key.front() == ' ')
                key.remove_prefix(1);
            const auto value = line.substr(eq + 1);
            if (key == "num_robots")
            {
                log.num_robots = parse_number<std::size_t>(value, line_no);
                have_n = true;
            }
            else if (key == "steps")
            {
                log.steps = parse_number<std::size_t>(value, line_no);
                have_steps = true;
            }
            else if (key == "seed")
                log.config.seed = parse_number<std::uint64_t>(value, line_no);
            else if (key == "realized_fill_ratio")
                log.realized_fill_ratio = parse_number<double>(value, line_no);
            else if (key == "flawed")
                for (char c : value)
                    log.flawed.push_back(c == '1');
            continue;
        }

        if (!have_n || !have_steps)
            throw ParseError("trial log is missing num_robots/steps metadata", line_no);
        const std::size_t width = 1 + 3 * log.num_robots;
        const auto fields = split(line, ',');
        if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " columns, found " +
                                 std::to_string(fields.size()),
                             line_no);
        if (!have_header)
        {
            if (fields.front() != "step")
                throw ParseError("trial log header must start with 'step'", line_no, 1);
            have_header = true;
            const std::size_t total = log.num_robots * log.steps;
            log.x.resize(total);
            log.x_hat.resize(total);
            log.b_hat.resize(total);
            continue;
        }
        if (k >= log.steps)
            throw ParseError("trial log has more rows than its steps metadata", line_no);
        for (std::size_t i = 0; i < log.num_robots; ++i)
        {
            log.x[i * log.steps + k] = parse_number<double>(fields[1 + i], line_no);
            log.x_hat[i * log.steps + k] = parse_number<double>(fields[1 + log.num_robots + i], line_no);
            log.b_hat[i * log.steps + k] = parse_number<double>(fields[1 + 2 * log.num_robots + i], line_no);
        }
        ++k;
    }
    if (!have_header)
        throw ParseError("trial log has no header row");
    if (k != log.steps)
        throw ParseError("trial log has " + std::to_string(k) + " rows, metadata says " + std::to_string(log.steps));
    log.config.num_robots = log.num_robots;
    log.config.k_max = log.steps;
    return log;
}

} // namespace sdfsim
