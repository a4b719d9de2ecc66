#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

/// Failure to create, write or read a file; the message carries the path.
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(what + ": " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Frozen column schemas, one per scenario kind.
namespace csv_schema {
inline const std::vector<std::string> certificate{"n",       "supp_lo",      "supp_hi",
                                                  "l1",      "l2sq",         "l2sq_lower_bound",
                                                  "log2_f_tstar", "induction_min_slack", "induction_verdict"};
inline const std::vector<std::string> trajectory{"t",       "l2_norm",     "hs_norm",         "hdot_norm",
                                                 "xs_norm", "fourier_min", "positivity_ratio"};
inline const std::vector<std::string> sweep{"param", "value", "blew_up", "t_blowup", "t_final", "max_l2_norm", "steps"};
inline const std::vector<std::string> regress{"t",        "l2_sq",          "l2_sq_bound", "l2_margin",
                                              "dx_l2_sq", "dx_l2_sq_bound", "dx_margin"};
}  // namespace csv_schema

/// Shortest round-trip text for a double; "nan", "inf", "-inf" for the rest.
inline std::string csv_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
        if (header_.empty()) throw std::invalid_argument("csv header must not be empty");
    }

    void add_row(std::vector<std::string> row) {
        if (row.size() != header_.size())
            throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " fields, header has " +
                                        std::to_string(header_.size()));
        for (const auto& f : row)
            if (f.find_first_of(",\n\r\"") != std::string::npos)
                throw std::invalid_argument("csv field needs quoting: " + f);
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += r[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError(path, "cannot open for writing");
        f << str();
        if (!f) throw IoError(path, "write failed");
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError(path, "cannot open for writing");
    f << text;
    if (!f) throw IoError(path, "write failed");
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path, "cannot open for reading");
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace kvb
