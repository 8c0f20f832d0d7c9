#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wmtrack::cli {

// shortest text that parses back to the same double
std::string num(double v);

// hash of the content as `git hash-object` would compute it
std::string git_sha1(const std::string& content);

struct CsvHeader {
    std::string title;
    std::string config;  // canonical JSON, may be empty
    std::vector<std::pair<std::string, std::string>> meta;
};

std::string render_csv(const CsvHeader& head, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows);
void write_file(const std::string& path, const std::string& content);

struct TraceFile {
    std::string config;
    std::map<std::string, double> meta;
    std::vector<double> signal;
    std::vector<std::optional<double>> counts;
};

// throws FormatError on anything it does not recognise
TraceFile read_trace(const std::string& path);
TraceFile parse_trace(const std::string& text);

}  // namespace wmtrack::cli
