#include "kfv/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kfv/error.hpp"

namespace kfv {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw IoError("cannot open for writing: " + tmp.string());
        }
        os << content;
        os.flush();
        if (!os) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("rename failed for " + target.string() + ": " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open for reading: " + path);
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace kfv
