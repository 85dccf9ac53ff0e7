#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace moire {

/// Shortest text for a double at 17 significant digits ("%.17g").
std::string fmt17(double x);

/// Compact JSON text with doubles at 17 significant digits and keys in insertion order.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

/// Minimal CSV writer: a provenance comment line, a header row, then numeric rows.
class CsvWriter {
public:
    CsvWriter(const nlohmann::ordered_json& provenance, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::string text_;
};

/// Writes text to path, or standard output when path is empty.
void emit(const std::string& path, const std::string& text);

}  // namespace moire
