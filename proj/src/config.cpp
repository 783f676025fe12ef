#include "polycall/config.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace polycall {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& csv_text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv_text) {
        if (c == ',') {
            std::string item = trim(cur);
            if (!item.empty()) out.push_back(item);
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string item = trim(cur);
    if (!item.empty()) out.push_back(item);
    return out;
}

LintOptions Config::lint_options() const {
    LintOptions opts;
    opts.check_m1 = opts.check_m2 = opts.check_m3 = opts.check_r1 = false;
    for (const auto& r : rules) {
        std::string low;
        for (char c : r) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (low == "m1") opts.check_m1 = true;
        else if (low == "m2") opts.check_m2 = true;
        else if (low == "m3") opts.check_m3 = true;
        else if (low == "r1") opts.check_r1 = true;
        else throw std::runtime_error("unknown rule name: '" + r + "'");
    }
    opts.cpp_source_exts = cpp_source_exts;
    opts.cpp_header_exts = cpp_header_exts;
    return opts;
}

void apply_config_line(Config& cfg, const std::string& line, int line_no) {
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') return;
    size_t eq = text.find('=');
    if (eq == std::string::npos) {
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
    }
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key == "py_ext") cfg.py_exts = split_list(value);
    else if (key == "cpp_ext") cfg.cpp_source_exts = split_list(value);
    else if (key == "cpp_header_ext") cfg.cpp_header_exts = split_list(value);
    else if (key == "rules") cfg.rules = split_list(value);
    else if (key == "strict") cfg.strict = (value == "true" || value == "1" || value == "yes");
    else if (key == "out") cfg.out_dir = value;
    else {
        throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" +
                                 key + "'");
    }
}

Config load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        apply_config_line(cfg, line, ++line_no);
    }
    return cfg;
}

}  // namespace polycall
