// Copyright 2026 The mzi-twophoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MZI_IO_CSV_HPP
#define MZI_IO_CSV_HPP

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mzi/errors.hpp"
#include "mzi/experiment.hpp"

namespace mzi::io {

inline constexpr std::array<std::string_view, 5> kRawColumns = {"setting", "counts", "integration_time_s",
                                                                 "rate_per_s", "rate_err_per_s"};
inline constexpr std::array<std::string_view, 2> kBackgroundColumns = {"bg_rate_per_s", "bg_rate_err_per_s"};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline void write_scan_csv(std::ostream& os, const ScanResult& scan) {
    for (std::size_t i = 0; i < kRawColumns.size(); ++i) os << (i ? "," : "") << kRawColumns[i];
    if (scan.background_subtracted) {
        for (auto c : kBackgroundColumns) os << ',' << c;
    }
    os << '\n';
    for (const CountRecord& r : scan.records) {
        os << format_double(r.setting) << ',' << format_double(r.counts) << ',' << format_double(r.integration_time)
           << ',' << format_double(r.rate) << ',' << format_double(r.rate_err);
        if (scan.background_subtracted) os << ',' << format_double(r.bg_rate) << ',' << format_double(r.bg_rate_err);
        os << '\n';
    }
}

inline void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_scan_csv(os, scan);
    if (!os) throw IoError("failed writing " + path.string());
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        std::string_view field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        out.push_back(field);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, int line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw IoError("line " + std::to_string(line) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

}  // namespace detail

/// Reads the scan CSV schema. Background columns, when present, mark the scan
/// as subtracted. The scan kind is not stored in the file; pass it in.
inline ScanResult read_scan_csv(std::istream& is, ScanKind kind) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty CSV input");
    const auto header = detail::split_commas(line);
    auto column = [&](std::string_view name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    std::array<int, 5> raw{};
    for (std::size_t i = 0; i < kRawColumns.size(); ++i) {
        raw[i] = column(kRawColumns[i]);
        if (raw[i] < 0) throw IoError("CSV header lacks column '" + std::string(kRawColumns[i]) + "'");
    }
    const int bg = column(kBackgroundColumns[0]);
    const int bg_err = column(kBackgroundColumns[1]);
    if ((bg < 0) != (bg_err < 0)) throw IoError("CSV has only one of the background columns");

    ScanResult scan;
    scan.kind = kind;
    scan.background_subtracted = bg >= 0;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_commas(line);
        if (fields.size() != header.size()) {
            throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                          " fields, got " + std::to_string(fields.size()));
        }
        auto at = [&](int idx) { return detail::parse_double(fields[static_cast<std::size_t>(idx)], line_no); };
        CountRecord r;
        r.setting = at(raw[0]);
        r.counts = at(raw[1]);
        r.integration_time = at(raw[2]);
        r.rate = at(raw[3]);
        r.rate_err = at(raw[4]);
        if (bg >= 0) {
            r.bg_rate = at(bg);
            r.bg_rate_err = at(bg_err);
        }
        scan.records.push_back(r);
    }
    return scan;
}

inline ScanResult read_scan_csv(const std::filesystem::path& path, ScanKind kind) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_scan_csv(is, kind);
}

}  // namespace mzi::io

#endif  // MZI_IO_CSV_HPP
