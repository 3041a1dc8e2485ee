#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "mtsref/qbf.hpp"

namespace mtsref {

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        std::string dir = std::filesystem::temp_directory_path().string();
        std::string tmpl = dir + "/mtsref-XXXXXX.qdimacs";
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        int fd = mkstemps(buf.data(), 8);
        if (fd < 0) throw Error(ErrorCode::SolverUnavailable, "cannot create temporary file");
        path = buf.data();
        std::size_t off = 0;
        while (off < contents.size()) {
            ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
            if (n <= 0) {
                ::close(fd);
                throw Error(ErrorCode::SolverUnavailable, "cannot write temporary file");
            }
            off += static_cast<std::size_t>(n);
        }
        ::close(fd);
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string shellQuote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out.push_back(c);
    }
    return out + "'";
}

}  // namespace

bool solveExternal(const QbfInstance& inst, const ExternalSolverOptions& options) {
    if (options.command.empty()) throw Error(ErrorCode::SolverUnavailable, "no solver command given");
    TempFile file(toQdimacs(inst));
    std::string cmd = options.command;
    const std::string placeholder = "{file}";
    if (auto pos = cmd.find(placeholder); pos != std::string::npos) {
        do {
            cmd.replace(pos, placeholder.size(), shellQuote(file.path));
            pos = cmd.find(placeholder, pos + 1);
        } while (pos != std::string::npos);
    } else {
        cmd += " " + shellQuote(file.path);
    }

    pid_t pid = fork();
    if (pid < 0) throw Error(ErrorCode::SolverUnavailable, "fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        int devnull = ::open("/dev/null", O_RDWR);
        if (devnull >= 0) {
            dup2(devnull, STDIN_FILENO);
            dup2(devnull, STDOUT_FILENO);
            dup2(devnull, STDERR_FILENO);
        }
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);
    const auto start = std::chrono::steady_clock::now();
    int status = 0;
    for (;;) {
        pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw Error(ErrorCode::SolverProtocol, "waitpid failed");
        if (options.timeoutSeconds &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > *options.timeoutSeconds) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw Error(ErrorCode::SolverTimeout, "solver exceeded " + std::to_string(*options.timeoutSeconds) + " s");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (!WIFEXITED(status))
        throw Error(ErrorCode::SolverProtocol, "solver terminated by signal " + std::to_string(WTERMSIG(status)));
    switch (WEXITSTATUS(status)) {
    case 10: return true;
    case 20: return false;
    case 126:
    case 127: throw Error(ErrorCode::SolverUnavailable, "solver command not runnable: " + options.command);
    default: throw Error(ErrorCode::SolverProtocol, "unexpected solver exit status " + std::to_string(WEXITSTATUS(status)));
    }
}

}  // namespace mtsref
