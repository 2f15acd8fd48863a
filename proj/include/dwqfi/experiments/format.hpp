/**
 * @brief Deterministic text output: shortest round-trip number formatting,
 * CSV tables with a '#' metadata header, and SHA-256 digests.
 */
#pragma once

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dwqfi::experiments {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double value)
{
    if (value == 0.0)
        value = 0.0; // drop the sign of negative zero
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buffer.data(), end);
}

inline std::string sha256_hex(std::string_view data)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1
        || EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1
        || EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1)
        throw std::runtime_error("sha256: digest computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

inline constexpr std::string_view units_note = "time in units of 1/kappa; lambda = Omega/kappa_r";
inline constexpr std::string_view classical_units_note = "time in units of 1/kappa_r; lambda = Omega/kappa_r";
inline constexpr std::string_view float_format_note =
    "numbers use the shortest decimal form that round-trips to the same IEEE-754 double";

/// Accumulates a CSV table in memory so the bytes can be hashed as written.
class CsvTable {
public:
    CsvTable(std::vector<std::string> metadata, std::vector<std::string> columns)
        : columns_(columns.size())
    {
        for (const auto& line : metadata)
            text_ += "# " + line + '\n';
        append_row(columns);
    }

    void add_row(const std::vector<std::string>& cells)
    {
        if (cells.size() != columns_)
            throw std::logic_error("csv: row has " + std::to_string(cells.size()) + " cells, expected "
                                   + std::to_string(columns_));
        append_row(cells);
    }

    void add_row(std::initializer_list<double> values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_double(v));
        add_row(cells);
    }

    const std::string& text() const noexcept { return text_; }

private:
    void append_row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    std::size_t columns_;
    std::string text_;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace dwqfi::experiments
