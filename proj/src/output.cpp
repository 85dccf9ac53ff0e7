#include "moire/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "moire/types.hpp"

namespace moire {

using nlohmann::ordered_json;

std::string fmt17(double x) { return fmt::format("{:.17g}", x); }

namespace {

bool is_scalar(const ordered_json& j) { return !j.is_object() && !j.is_array(); }

void write(const ordered_json& j, int indent, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (j.type()) {
        case ordered_json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? fmt17(x) : "null";
            return;
        }
        case ordered_json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += ordered_json(k).dump();
                out += sep;
                write(v, indent, depth + 1, out);
            }
            out += nl;
            out += close_pad;
            out += "}";
            return;
        }
        case ordered_json::value_t::array: {
            const bool flat = indent == 0 || std::all_of(j.begin(), j.end(), is_scalar);
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += flat ? (indent > 0 ? ", " : ",") : ",";
                if (!flat) {
                    out += nl;
                    out += pad;
                }
                first = false;
                write(v, indent, depth + 1, out);
            }
            if (!flat && !j.empty()) {
                out += nl;
                out += close_pad;
            }
            out += "]";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const ordered_json& j, int indent) {
    std::string out;
    write(j, indent, 0, out);
    return out;
}

CsvWriter::CsvWriter(const ordered_json& provenance, const std::vector<std::string>& header)
    : columns_(header.size()) {
    text_ = "# provenance: " + dump_json(provenance, 0) + "\n";
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw Error("CSV row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ",";
        text_ += fmt17(values[i]);
    }
    text_ += "\n";
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open output file '" + path + "'");
    f << text;
    if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace moire
