#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "bss/agent.hpp"
#include "bss/wire.hpp"

namespace bss {

/// Environment variable consulted by the CLI for a default proposer
/// command when --proposer-cmd is not given.
inline constexpr const char* kProposerCommandEnv = "BSS_PROPOSER_CMD";

/// Bridges the loop to a child process speaking line-delimited JSON:
/// one request object on stdin, one response object on stdout. The child
/// is spawned per exchange, so proposer crashes cannot poison later
/// iterations; a slow child is killed after `timeout_ms`.
class ExternalProposer : public Proposer {
 public:
  explicit ExternalProposer(std::vector<std::string> argv, int timeout_ms = 10000)
      : argv_(std::move(argv)), timeout_ms_(timeout_ms) {
    if (argv_.empty()) throw std::invalid_argument("external proposer needs a command");
    if (timeout_ms_ < 1) throw std::invalid_argument("timeout must be >= 1 ms");
  }

  ProposerResponse propose(const ProposerRequest& req) override {
    const std::string line = encode_request(req).dump() + "\n";
    const std::string reply = run_child(line);
    return parse_response(reply);
  }

 private:
  [[noreturn]] static void child_exec(const std::vector<std::string>& argv, int in_fd,
                                      int out_fd) {
    ::dup2(in_fd, STDIN_FILENO);
    ::dup2(out_fd, STDOUT_FILENO);
    ::close(in_fd);
    ::close(out_fd);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const std::string& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    std::perror("execvp");
    ::_exit(127);
  }

  std::string run_child(const std::string& request_line) const {
    int to_child[2] = {-1, -1};
    int from_child[2] = {-1, -1};
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
      if (to_child[0] >= 0) ::close(to_child[0]);
      if (to_child[1] >= 0) ::close(to_child[1]);
      throw std::runtime_error("pipe failed");
    }

    const pid_t pid = ::fork();
    if (pid < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw std::runtime_error("fork failed");
    }
    if (pid == 0) {
      ::close(to_child[1]);
      ::close(from_child[0]);
      child_exec(argv_, to_child[0], from_child[1]);
    }

    ::close(to_child[0]);
    ::close(from_child[1]);

    std::string reply;
    bool timed_out = false;
    std::string transport_error;
    {
      // Write the request; a child exiting early yields EPIPE, surfaced
      // below as a transport error rather than a SIGPIPE kill.
      signal(SIGPIPE, SIG_IGN);
      std::size_t written = 0;
      while (written < request_line.size()) {
        const ssize_t n = ::write(to_child[1], request_line.data() + written,
                                  request_line.size() - written);
        if (n < 0) {
          if (errno == EINTR) continue;
          transport_error = std::string("write to proposer failed: ") + std::strerror(errno);
          break;
        }
        written += static_cast<std::size_t>(n);
      }
      ::close(to_child[1]);

      if (transport_error.empty()) {
        char buf[4096];
        while (reply.find('\n') == std::string::npos) {
          struct pollfd pfd = {from_child[0], POLLIN, 0};
          const int ready = ::poll(&pfd, 1, timeout_ms_);
          if (ready == 0) {
            timed_out = true;
            break;
          }
          if (ready < 0) {
            if (errno == EINTR) continue;
            transport_error = std::string("poll failed: ") + std::strerror(errno);
            break;
          }
          const ssize_t n = ::read(from_child[0], buf, sizeof(buf));
          if (n < 0) {
            if (errno == EINTR) continue;
            transport_error = std::string("read from proposer failed: ") + std::strerror(errno);
            break;
          }
          if (n == 0) break;  // EOF
          reply.append(buf, static_cast<std::size_t>(n));
        }
      }
    }
    ::close(from_child[0]);

    if (timed_out) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);

    if (timed_out)
      throw std::runtime_error("proposer timed out after " + std::to_string(timeout_ms_) +
                               " ms");
    if (!transport_error.empty()) throw std::runtime_error(transport_error);

    const std::size_t nl = reply.find('\n');
    if (nl == std::string::npos) {
      if (reply.empty())
        throw std::runtime_error("proposer produced no output");
      // Treat a final unterminated line as the response.
      return reply;
    }
    return reply.substr(0, nl);
  }

  std::vector<std::string> argv_;
  int timeout_ms_;
};

}  // namespace bss
