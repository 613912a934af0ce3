#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace testutil {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
  public:
    TempDir() {
        auto pattern =
            (std::filesystem::temp_directory_path() / "yoloslim-test-XXXXXX")
                .string();
        if (!mkdtemp(pattern.data())) {
            throw std::runtime_error("mkdtemp failed");
        }
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const {
        return path_ / name;
    }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p,
                       const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Runs a command line through the shell and captures combined output.
inline CliResult run_command(const std::string& command) {
    CliResult result;
    FILE* pipe = popen((command + " 2>&1").c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + command);
    char buffer[4096];
    size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

#ifdef YOLOSLIM_CLI_PATH
inline CliResult run_cli(const std::string& args) {
    return run_command(std::string(YOLOSLIM_CLI_PATH) + " " + args);
}
#endif

}  // namespace testutil
