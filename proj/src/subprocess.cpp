#include "srcmark/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>

namespace srcmark {

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    bool open() { return ::pipe(fds) == 0; }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

}  // namespace

Result<RunResult> run_process(const std::vector<std::string>& argv, const RunOptions& options) {
    if (argv.empty()) return fail<RunResult>(ErrorKind::Environment, "empty command line");

    Pipe in, out, err;
    if (!in.open() || !out.open() || !err.open())
        return fail<RunResult>(ErrorKind::Environment, "pipe() failed");

    // exec failures in the child are reported through this pipe.
    Pipe status;
    if (!status.open()) return fail<RunResult>(ErrorKind::Environment, "pipe() failed");
    ::fcntl(status.fds[1], F_SETFD, FD_CLOEXEC);

    pid_t pid = ::fork();
    if (pid < 0) return fail<RunResult>(ErrorKind::Environment, "fork() failed");

    if (pid == 0) {
        ::dup2(in.fds[0], STDIN_FILENO);
        ::dup2(out.fds[1], STDOUT_FILENO);
        ::dup2(err.fds[1], STDERR_FILENO);
        in.close_read();
        in.close_write();
        out.close_read();
        out.close_write();
        err.close_read();
        err.close_write();
        status.close_read();

        if (options.cwd && ::chdir(options.cwd->c_str()) != 0) _exit(127);
        for (const auto& [key, value] : options.env) ::setenv(key.c_str(), value.c_str(), 1);

        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execvp(args[0], args.data());

        int code = errno;
        ssize_t n = ::write(status.fds[1], &code, sizeof(code));
        (void)n;
        _exit(127);
    }

    in.close_read();
    out.close_write();
    err.close_write();
    status.close_write();

    RunResult result;
    std::string_view pending_input = options.input;
    if (pending_input.empty()) in.close_write();

    bool out_open = true, err_open = true;
    while (out_open || err_open || !pending_input.empty()) {
        struct pollfd fds[3];
        int nfds = 0;
        int out_idx = -1, err_idx = -1, in_idx = -1;
        if (out_open) {
            out_idx = nfds;
            fds[nfds++] = {out.fds[0], POLLIN, 0};
        }
        if (err_open) {
            err_idx = nfds;
            fds[nfds++] = {err.fds[0], POLLIN, 0};
        }
        if (!pending_input.empty()) {
            in_idx = nfds;
            fds[nfds++] = {in.fds[1], POLLOUT, 0};
        }
        if (::poll(fds, nfds, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        char buf[16384];
        if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t n = ::read(out.fds[0], buf, sizeof(buf));
            if (n > 0)
                result.output.append(buf, static_cast<std::size_t>(n));
            else
                out_open = false;
        }
        if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
            ssize_t n = ::read(err.fds[0], buf, sizeof(buf));
            if (n > 0)
                result.error_output.append(buf, static_cast<std::size_t>(n));
            else
                err_open = false;
        }
        if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (fds[in_idx].revents & (POLLERR | POLLHUP)) {
                pending_input = {};
                in.close_write();
            } else {
                ssize_t n = ::write(in.fds[1], pending_input.data(),
                                    std::min<std::size_t>(pending_input.size(), 65536));
                if (n > 0)
                    pending_input.remove_prefix(static_cast<std::size_t>(n));
                else
                    pending_input = {};
                if (pending_input.empty()) in.close_write();
            }
        }
    }
    in.close_write();

    int wstatus = 0;
    ::waitpid(pid, &wstatus, 0);

    int exec_errno = 0;
    ssize_t n = ::read(status.fds[0], &exec_errno, sizeof(exec_errno));
    if (n == sizeof(exec_errno))
        return fail<RunResult>(ErrorKind::Environment,
                               "cannot run '" + argv[0] + "': " + std::strerror(exec_errno));

    if (WIFEXITED(wstatus))
        result.exit_code = WEXITSTATUS(wstatus);
    else if (WIFSIGNALED(wstatus))
        result.exit_code = 128 + WTERMSIG(wstatus);
    return result;
}

}  // namespace srcmark
