// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace srforge {

// Column-major n x d matrix of observations.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    std::span<const double> col(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }
    std::span<double> col(std::size_t c) { return {data_.data() + c * rows_, rows_}; }

    std::vector<double> row(std::size_t r) const;
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);
    Matrix select_rows(std::span<const std::size_t> rows) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Distribution { Uniform, Even };

struct Range {
    double low = -1.0;
    double high = 1.0;
    friend bool operator==(const Range&, const Range&) = default;
};

// Sampling recipe in the benchmark notation U(low, high, n) / E(low, high, n).
// `ranges` holds one range per variable, or a single range shared by all.
struct SamplingSpec {
    Distribution dist = Distribution::Uniform;
    std::vector<Range> ranges{Range{}};
    std::size_t n = 20;

    Range range(std::size_t var) const { return ranges.size() == 1 ? ranges[0] : ranges.at(var); }
    static SamplingSpec uniform(double low, double high, std::size_t n) { return {Distribution::Uniform, {{low, high}}, n}; }
    static SamplingSpec even(double low, double high, std::size_t n) { return {Distribution::Even, {{low, high}}, n}; }

    // "U(-1, 1, 20)"
    std::string to_string() const;
    friend bool operator==(const SamplingSpec&, const SamplingSpec&) = default;
};

nlohmann::ordered_json to_json(const SamplingSpec& spec);
SamplingSpec sampling_spec_from_json(const nlohmann::json& j);
// Parses "U(-1, 1, 20)" / "E(1, 50, 50)".
SamplingSpec parse_sampling_spec(std::string_view text);

struct Dataset {
    Matrix X;
    std::vector<double> y;
    SamplingSpec spec;
    double noise_sigma = 0.0;

    std::size_t rows() const noexcept { return y.size(); }
    std::size_t dims() const noexcept { return X.cols(); }
};

// Throws ConfigError when the invariants (equal row counts, finite entries) fail.
void validate(const Dataset& ds);

std::string to_csv(const Dataset& ds);
// Reads the to_csv layout: a header row, then numeric rows with y last.
// Throws ConfigError on ragged or non-numeric rows.
Dataset dataset_from_csv(std::string_view text);

} // namespace srforge
