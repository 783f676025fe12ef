#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "polycall/lint.hpp"

namespace polycall {

// Tool configuration: "key = value" config file, overridden by flags.
struct Config {
    std::vector<std::string> py_exts = {".py"};
    std::vector<std::string> cpp_source_exts = {".cpp", ".cc", ".cxx"};
    std::vector<std::string> cpp_header_exts = {".h", ".hpp", ".hh"};
    std::vector<std::string> rules = {"m1", "m2", "m3"};
    bool strict = false;
    std::string out_dir = "ir";

    LintOptions lint_options() const;
};

// Parses a line-oriented config file: "key = value", '#' comments, blank
// lines ignored. Unknown keys are an error. List values are comma-separated.
Config load_config_file(const std::filesystem::path& path);
void apply_config_line(Config& cfg, const std::string& line, int line_no);

std::vector<std::string> split_list(const std::string& csv_text);

}  // namespace polycall
