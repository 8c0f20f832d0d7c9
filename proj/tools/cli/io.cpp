#include "cli/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "wmtrack/errors.hpp"

namespace wmtrack::cli {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string git_sha1(const std::string& content) {
    std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr)) throw Error("sha1 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string render_csv(const CsvHeader& head, const std::vector<std::string>& columns,
                       const std::vector<std::vector<std::string>>& rows) {
    std::string s = "# " + head.title + "\n";
    if (!head.config.empty()) {
        s += "# config: " + head.config + "\n";
        s += "# config_sha1: " + git_sha1(head.config) + "\n";
    }
    for (auto& [k, v] : head.meta) s += "# " + k + " = " + v + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) s += (i ? "," : "") + columns[i];
    s += "\n";
    for (auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += ',';
            s += r[i];
        }
        s += "\n";
    }
    return s;
}

void write_file(const std::string& path, const std::string& content) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + path);
}

namespace {

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    if (s == "nan") return std::nan("");
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

TraceFile parse_trace(const std::string& text) {
    TraceFile t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    bool have_counts = false;
    auto fail = [&](const std::string& why) { throw FormatError("line " + std::to_string(lineno) + ": " + why); };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (have_header) fail("comment after the column header");
            if (line.rfind("# config: ", 0) == 0) {
                t.config = line.substr(10);
                continue;
            }
            auto eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            std::string key = line.substr(2, eq - 2);
            if (auto v = parse_number(std::string_view(line).substr(eq + 3))) t.meta[key] = *v;
            continue;
        }
        if (!have_header) {
            if (line == "index,time_s,signal,counts") have_counts = true;
            else if (line != "index,time_s,signal") fail("expected a trace header, got \"" + line + "\"");
            have_header = true;
            continue;
        }
        auto f = split(line);
        if (f.size() != (have_counts ? 4u : 3u)) fail("wrong number of fields");
        auto idx = parse_number(f[0]);
        auto time = parse_number(f[1]);
        auto sig = parse_number(f[2]);
        if (!idx || !time || !sig) fail("non-numeric field");
        if (*idx != static_cast<double>(t.signal.size())) fail("index out of sequence");
        t.signal.push_back(*sig);
        if (have_counts) {
            if (f[3].empty()) t.counts.push_back(std::nullopt);
            else if (auto c = parse_number(f[3])) t.counts.push_back(*c);
            else fail("non-numeric count");
        }
    }
    if (!have_header) throw FormatError("no trace header found");
    if (t.signal.empty()) throw FormatError("trace holds no samples");
    auto ts = t.meta.find("t_s");
    if (ts == t.meta.end() || !(ts->second > 0.0)) throw FormatError("trace lacks a positive t_s metadata line");
    return t;
}

TraceFile read_trace(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read trace " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str());
}

}  // namespace wmtrack::cli
