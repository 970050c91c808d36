#pragma once

#include <stdexcept>
#include <string>

#include "msckit/exec.hpp"
#include "msckit/msc.hpp"

namespace msckit {

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line) : std::runtime_error(format(what, line)), line(line) {}
    int line;

private:
    static std::string format(const std::string& what, int line) {
        return line > 0 ? "line " + std::to_string(line) + ": " + what : what;
    }
};

// Line format:
//   processes p q r
//   message m1 p q [lost] [payload x]
//   order p !m1 ?m2
Msc parse_msc_text(const std::string& text);
std::string write_msc_text(const Msc& msc);

Msc parse_msc_json(const std::string& text);
std::string write_msc_json(const Msc& msc);

// picks JSON when the first non-blank character is '{'
Msc parse_msc(const std::string& text);
Msc load_msc(const std::string& path);

// one action per line: "! p q m" or "? p q m"; an optional "processes" line fixes the order
Execution parse_execution(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace msckit
