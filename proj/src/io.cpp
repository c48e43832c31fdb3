#include "xformtest/io.hpp"

#include "xformtest/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace xformtest {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto nl = text.find('\n', start);
        const auto end = nl == std::string_view::npos ? text.size() : nl;
        lines.push_back(text.substr(start, end - start));
        if (nl == std::string_view::npos) {
            break;
        }
        start = nl + 1;
    }
    return lines;
}

bool all_numeric(const std::vector<std::string_view>& fields) {
    double ignored = 0.0;
    for (auto f : fields) {
        if (!parse_double(f, ignored)) {
            return false;
        }
    }
    return true;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Table {
    std::vector<std::string> header;  // empty when headerless
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> line_numbers;
};

Table tabulate(std::string_view text) {
    Table t;
    bool first = true;
    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (first) {
            first = false;
            if (!all_numeric(fields)) {
                for (auto f : fields) {
                    t.header.emplace_back(f);
                }
                continue;
            }
        }
        t.rows.push_back(std::move(fields));
        t.line_numbers.push_back(line_no);
    }
    return t;
}

std::size_t resolve_column(const Table& t, const std::string& column, const std::string& source) {
    if (column.empty()) {
        return 0;
    }
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == column) {
            return i;
        }
    }
    std::size_t idx = 0;
    const auto* end = column.data() + column.size();
    const auto [ptr, ec] = std::from_chars(column.data(), end, idx);
    if (ec == std::errc() && ptr == end) {
        return idx;
    }
    throw ParseError(source + ": no column named '" + column + "'");
}

std::vector<double> extract(const Table& t, std::size_t col, const std::string& source) {
    std::vector<double> values;
    values.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = source + ":" + std::to_string(t.line_numbers[r]);
        if (col >= row.size()) {
            throw ParseError(where + ": missing column " + std::to_string(col));
        }
        double v = 0.0;
        if (!parse_double(row[col], v)) {
            throw ParseError(where + ": not a finite number: '" + std::string(row[col]) + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        throw ParseError(source + ": no numeric values");
    }
    return values;
}

}  // namespace

bool parse_double(std::string_view field, double& out) {
    if (!field.empty() && field.front() == '+') {
        field.remove_prefix(1);
    }
    if (field.empty()) {
        return false;
    }
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<double> parse_column(std::string_view text, const std::string& column, const std::string& source) {
    const Table t = tabulate(text);
    return extract(t, resolve_column(t, column, source), source);
}

std::vector<double> read_column(const std::filesystem::path& path, const std::string& column) {
    const std::string text = slurp(path);
    return parse_column(text, column, path.string());
}

KnownCdf read_quantile_table(const std::filesystem::path& path) {
    const std::string text = slurp(path);
    const Table t = tabulate(text);
    auto ps = extract(t, 0, path.string());
    auto qs = extract(t, 1, path.string());
    try {
        return KnownCdf::from_quantile_table(std::move(ps), std::move(qs));
    } catch (const std::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) {
        throw DomainError("format_number: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

std::string sha256_file(const std::filesystem::path& path) {
    const std::string bytes = slurp(path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw std::runtime_error("sha256 failed for " + path.string());
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

}  // namespace xformtest
