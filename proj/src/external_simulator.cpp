#include "abmcalib/external_simulator.hpp"

#include "abmcalib/errors.hpp"
#include "abmcalib/summary_io.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace abmcalib {

namespace {

std::string substitute(std::string arg, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = arg.find(key, pos)) != std::string::npos) {
        arg.replace(pos, key.size(), value);
        pos += value.size();
    }
    return arg;
}

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream in(command);
    std::vector<std::string> argv;
    std::string token;
    while (in >> token) argv.push_back(token);
    return argv;
}

struct ChildResult {
    int exit_code = -1;
    bool timed_out = false;
    bool signaled = false;
    std::string output;
};

ChildResult run_child(const std::vector<std::string>& argv, const std::string& workdir,
                      double timeout_seconds) {
    int pipe_fd[2];
    if (pipe(pipe_fd) != 0) {
        throw IoError("pipe() failed: " + std::string(std::strerror(errno)));
    }

    const pid_t pid = fork();
    if (pid < 0) {
        close(pipe_fd[0]);
        close(pipe_fd[1]);
        throw IoError("fork() failed: " + std::string(std::strerror(errno)));
    }

    if (pid == 0) {
        // Child: merge stdout/stderr into the pipe and exec.
        close(pipe_fd[0]);
        dup2(pipe_fd[1], STDOUT_FILENO);
        dup2(pipe_fd[1], STDERR_FILENO);
        close(pipe_fd[1]);
        if (chdir(workdir.c_str()) != 0) {
            _exit(127);
        }
        std::vector<char*> raw;
        raw.reserve(argv.size() + 1);
        for (const auto& a : argv) raw.push_back(const_cast<char*>(a.c_str()));
        raw.push_back(nullptr);
        execvp(raw[0], raw.data());
        _exit(127);
    }

    close(pipe_fd[1]);
    fcntl(pipe_fd[0], F_SETFL, O_NONBLOCK);

    ChildResult result;
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(timeout_seconds));
    constexpr std::size_t kOutputCap = 64 * 1024;
    char buffer[4096];
    bool child_done = false;
    bool pipe_open = true;

    while (true) {
        if (pipe_open) {
            pollfd pfd{pipe_fd[0], POLLIN, 0};
            const int ready = poll(&pfd, 1, 50);
            if (ready > 0) {
                const ssize_t got = read(pipe_fd[0], buffer, sizeof(buffer));
                if (got > 0) {
                    if (result.output.size() < kOutputCap) {
                        result.output.append(buffer,
                                             static_cast<std::size_t>(std::min<ssize_t>(
                                                 got, static_cast<ssize_t>(kOutputCap -
                                                                           result.output.size()))));
                    }
                } else if (got == 0) {
                    pipe_open = false;
                }
            }
        } else if (!child_done) {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }

        if (!child_done) {
            int status = 0;
            const pid_t waited = waitpid(pid, &status, WNOHANG);
            if (waited == pid) {
                child_done = true;
                if (WIFEXITED(status)) {
                    result.exit_code = WEXITSTATUS(status);
                } else if (WIFSIGNALED(status)) {
                    result.signaled = true;
                    result.exit_code = 128 + WTERMSIG(status);
                }
            }
        }

        if (child_done && !pipe_open) break;

        if (!child_done && std::chrono::steady_clock::now() > deadline) {
            kill(pid, SIGKILL);
            int status = 0;
            waitpid(pid, &status, 0);
            result.timed_out = true;
            break;
        }
    }
    close(pipe_fd[0]);
    return result;
}

} // namespace

SimulationSummary external_evaluate(const ExternalSimulatorConfig& config,
                                    const ParameterSpace& space, const ParameterVector& theta,
                                    std::uint64_t seed) {
    namespace fs = std::filesystem;
    if (config.timeout_seconds <= 0.0) {
        throw InputError("external simulator: timeout must be positive");
    }
    if (config.command.empty()) {
        throw InputError("external simulator: empty command");
    }
    std::error_code ec;
    fs::create_directories(config.workdir, ec);
    if (!fs::is_directory(config.workdir)) {
        throw IoError("external simulator: workdir unusable: " + config.workdir);
    }

    const std::string params_path = (fs::path(config.workdir) / "params.csv").string();
    write_params_csv(params_path, space, theta);

    std::vector<std::string> argv = split_command(config.command);
    if (argv.empty()) {
        throw InputError("external simulator: command has no tokens");
    }
    for (auto& arg : argv) {
        arg = substitute(arg, "{workdir}", config.workdir);
        arg = substitute(arg, "{params}", params_path);
        arg = substitute(arg, "{seed}", std::to_string(seed));
    }

    const ChildResult child = run_child(argv, config.workdir, config.timeout_seconds);
    if (child.timed_out) {
        throw TimeoutError("simulator '" + argv[0] + "' exceeded " +
                           std::to_string(config.timeout_seconds) + " s and was killed");
    }
    if (child.exit_code != 0) {
        std::string what = "simulator '" + argv[0] + "' exited with code " +
                           std::to_string(child.exit_code);
        if (child.signaled) what += " (terminated by signal)";
        if (!child.output.empty()) what += "; output:\n" + child.output;
        throw SimulatorError(what);
    }

    return load_summary_dir(config.workdir);
}

} // namespace abmcalib
