#pragma once

// Small CSV writer. Numbers use "%.12g" so reruns are byte-identical and the
// files stay readable; text fields are quoted only when needed.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "belief/error.hpp"

namespace belief {

using CsvField = std::variant<std::string, double, long long>;

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header) : out_(file) {
        if (!out_) throw std::runtime_error("cannot write " + file.string());
        write_strings(header);
    }

    void row(std::initializer_list<CsvField> fields) {
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            first = false;
            if (const auto* s = std::get_if<std::string>(&f)) out_ << csv_escape(*s);
            else if (const auto* d = std::get_if<double>(&f)) out_ << csv_number(*d);
            else out_ << std::get<long long>(f);
        }
        out_ << '\n';
    }

private:
    void write_strings(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << csv_escape(fields[i]);
        out_ << '\n';
    }

    std::ofstream out_;
};

} // namespace belief
