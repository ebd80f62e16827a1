// SPDX-License-Identifier: Apache-2.0
#include "srforge/dataset.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "srforge/error.hpp"
#include "srforge/token.hpp"

namespace srforge {

std::vector<double> Matrix::row(std::size_t r) const
{
    std::vector<double> out(cols_);
    for (std::size_t c = 0; c < cols_; ++c) out[c] = (*this)(r, c);
    return out;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw ConfigError("ragged matrix rows");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const
{
    Matrix m(rows.size(), cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) m(r, c) = (*this)(rows[r], c);
    }
    return m;
}

std::string SamplingSpec::to_string() const
{
    const char d = dist == Distribution::Uniform ? 'U' : 'E';
    if (ranges.size() == 1)
        return fmt::format("{}({}, {}, {})", d, format_number(ranges[0].low), format_number(ranges[0].high), n);
    std::string out = fmt::format("{}(", d);
    for (const auto& r : ranges) out += fmt::format("[{}, {}], ", format_number(r.low), format_number(r.high));
    return out + fmt::format("{})", n);
}

nlohmann::ordered_json to_json(const SamplingSpec& spec)
{
    nlohmann::ordered_json j;
    j["dist"] = spec.dist == Distribution::Uniform ? "U" : "E";
    if (spec.ranges.size() == 1) {
        j["low"] = spec.ranges[0].low;
        j["high"] = spec.ranges[0].high;
    } else {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : spec.ranges) arr.push_back({r.low, r.high});
        j["ranges"] = arr;
    }
    j["n"] = spec.n;
    return j;
}

SamplingSpec sampling_spec_from_json(const nlohmann::json& j)
{
    if (j.is_string()) return parse_sampling_spec(j.get<std::string>());
    SamplingSpec spec;
    auto dist = j.value("dist", std::string("U"));
    if (dist == "U") spec.dist = Distribution::Uniform;
    else if (dist == "E") spec.dist = Distribution::Even;
    else throw ConfigError(fmt::format("unknown sampling distribution '{}'", dist));
    if (j.contains("ranges")) {
        spec.ranges.clear();
        for (const auto& r : j.at("ranges")) spec.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    } else {
        spec.ranges = {{j.at("low").get<double>(), j.at("high").get<double>()}};
    }
    spec.n = j.at("n").get<std::size_t>();
    for (const auto& r : spec.ranges) {
        if (!(r.low <= r.high)) throw ConfigError("sampling range has low > high");
    }
    if (spec.n == 0) throw ConfigError("sampling spec needs n >= 1");
    return spec;
}

SamplingSpec parse_sampling_spec(std::string_view text)
{
    auto fail = [&] { return ConfigError(fmt::format("bad sampling spec '{}'", text)); };
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || open == 0) throw fail();
    SamplingSpec spec;
    char d = text[open - 1];
    if (d == 'U') spec.dist = Distribution::Uniform;
    else if (d == 'E') spec.dist = Distribution::Even;
    else throw fail();
    std::vector<double> values;
    auto body = text.substr(open + 1, close - open - 1);
    while (!body.empty()) {
        while (!body.empty() && (body.front() == ' ' || body.front() == ',')) body.remove_prefix(1);
        if (body.empty()) break;
        double v = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
        if (ec != std::errc{}) throw fail();
        values.push_back(v);
        body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
    }
    if (values.size() != 3 || values[2] < 1) throw fail();
    spec.ranges = {{values[0], values[1]}};
    spec.n = static_cast<std::size_t>(values[2]);
    return spec;
}

void validate(const Dataset& ds)
{
    if (ds.X.rows() != ds.y.size())
        throw ConfigError(fmt::format("dataset has {} rows in X but {} targets", ds.X.rows(), ds.y.size()));
    for (double v : ds.y) {
        if (!std::isfinite(v)) throw ConfigError("dataset target is not finite");
    }
    for (std::size_t c = 0; c < ds.X.cols(); ++c) {
        for (double v : ds.X.col(c)) {
            if (!std::isfinite(v)) throw ConfigError("dataset input is not finite");
        }
    }
}

std::string to_csv(const Dataset& ds)
{
    std::string out;
    for (std::size_t c = 0; c < ds.dims(); ++c) out += fmt::format("x{},", c + 1);
    out += "y\n";
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.dims(); ++c) out += fmt::format("{},", ds.X(r, c));
        out += fmt::format("{}\n", ds.y[r]);
    }
    return out;
}

Dataset dataset_from_csv(std::string_view text)
{
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                cells.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        return cells;
    };
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    std::size_t width = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) continue;
        auto cells = split(line);
        if (line_no == 1) {
            width = cells.size();
            if (width < 2) throw ConfigError("csv needs at least one input column and y");
            continue;
        }
        if (cells.size() != width) throw ConfigError(fmt::format("csv line {} has {} cells, expected {}", line_no, cells.size(), width));
        std::vector<double> row;
        for (auto cell : cells) {
            while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ConfigError(fmt::format("csv line {}: '{}' is not a number", line_no, cell));
            row.push_back(v);
        }
        y.push_back(row.back());
        row.pop_back();
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("csv has no data rows");
    Dataset ds;
    ds.X = Matrix::from_rows(rows);
    ds.y = std::move(y);
    validate(ds);
    return ds;
}

} // namespace srforge
