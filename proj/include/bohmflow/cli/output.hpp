#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "../errors.hpp"
#include "../version.hpp"

namespace bohmflow::cli {

/// Shortest decimal text that parses back to the same binary64.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Opens `dir/name` for writing, creating `dir` if needed.
inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
}

/// CSV writer that stamps the version and the resolved configuration into
/// leading `#` comment lines.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& dir, const std::string& name, const nlohmann::ordered_json& config,
              std::string_view columns)
        : out_(open_output(dir, name)) {
        out_ << "# " << kVersion << '\n';
        out_ << "# config: " << config.dump() << '\n';
        out_ << columns << '\n';
    }

    CsvWriter& field(double v) { return raw(format_double(v)); }
    CsvWriter& field(long long v) { return raw(std::to_string(v)); }
    CsvWriter& field(std::size_t v) { return raw(std::to_string(v)); }
    CsvWriter& field(int v) { return raw(std::to_string(v)); }
    void end_row() {
        out_ << '\n';
        first_ = true;
    }

private:
    CsvWriter& raw(const std::string& s) {
        if (!first_) out_ << ',';
        out_ << s;
        first_ = false;
        return *this;
    }

    std::ofstream out_;
    bool first_ = true;
};

inline void write_json(const std::filesystem::path& dir, const std::string& name, const nlohmann::ordered_json& doc) {
    auto f = open_output(dir, name);
    f << doc.dump(2) << '\n';
}

}  // namespace bohmflow::cli
