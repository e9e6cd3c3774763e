#include "sscope/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sscope {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace sscope
