// Copyright 2026 The vsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vsum/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>

#include "vsum/error.hpp"

extern char** environ;

namespace vsum {
namespace {

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

std::filesystem::path MakeStderrFile() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "vsum-stderr-XXXXXX").string();
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) {
    throw Error(ErrorCode::kIoError,
                std::string("cannot create stderr capture: ") + std::strerror(errno));
  }
  ::close(fd);
  return tmpl;
}

}  // namespace

std::vector<std::string> ExpandCommandTemplate(
    std::string_view command_template,
    const std::map<std::string, std::string>& vars) {
  std::vector<std::string> tokens;
  std::string current;
  bool in_token = false;
  char quote = 0;
  for (char c : command_template) {
    if (quote) {
      if (c == quote) {
        quote = 0;
      } else {
        current += c;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
      in_token = true;
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (in_token) tokens.push_back(std::move(current));
      current.clear();
      in_token = false;
    } else {
      current += c;
      in_token = true;
    }
  }
  if (quote) {
    throw Error(ErrorCode::kInvalidArgument,
                "unterminated quote in command template");
  }
  if (in_token) tokens.push_back(std::move(current));

  for (std::string& token : tokens) {
    std::string out;
    for (size_t i = 0; i < token.size();) {
      if (token[i] == '{') {
        const size_t close = token.find('}', i);
        if (close == std::string::npos) {
          throw Error(ErrorCode::kInvalidArgument,
                      "unbalanced '{' in command template token '" + token + "'");
        }
        const std::string name = token.substr(i + 1, close - i - 1);
        const auto it = vars.find(name);
        if (it == vars.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "unknown placeholder {" + name + "} in command template");
        }
        out += it->second;
        i = close + 1;
      } else {
        out += token[i++];
      }
    }
    token = std::move(out);
  }
  if (tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty command template");
  }
  return tokens;
}

Subprocess::Subprocess(const std::vector<std::string>& argv, Options options) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty argv");
  IgnoreSigpipeOnce();
  program_ = argv[0];
  stderr_path_ = MakeStderrFile();

  int in_pipe[2] = {-1, -1};
  int out_pipe[2] = {-1, -1};
  auto close_all = [&] {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
      if (fd >= 0) ::close(fd);
    }
  };
  if ((options.pipe_stdin && ::pipe2(in_pipe, O_CLOEXEC) != 0) ||
      (options.pipe_stdout && ::pipe2(out_pipe, O_CLOEXEC) != 0)) {
    close_all();
    throw Error(ErrorCode::kIoError, std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  if (options.pipe_stdin) {
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  } else {
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  }
  if (options.pipe_stdout) {
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
  } else {
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  }
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, stderr_path_.c_str(),
                                   O_WRONLY | O_TRUNC, 0600);

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  const int rc = ::posix_spawnp(&pid_, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    close_all();
    std::error_code ec;
    std::filesystem::remove(stderr_path_, ec);
    pid_ = -1;
    throw Error(ErrorCode::kTranscoderFailure,
                "cannot start '" + program_ + "': " + std::strerror(rc));
  }
  if (options.pipe_stdin) {
    ::close(in_pipe[0]);
    stdin_fd_ = in_pipe[1];
  }
  if (options.pipe_stdout) {
    ::close(out_pipe[1]);
    stdout_fd_ = out_pipe[0];
  }
}

Subprocess::~Subprocess() {
  CloseStdin();
  CloseStdout();
  if (pid_ > 0 && !waited_) {
    Kill();
    Wait();
  }
  std::error_code ec;
  std::filesystem::remove(stderr_path_, ec);
}

size_t Subprocess::ReadFull(void* buffer, size_t n) {
  if (stdout_fd_ < 0) return 0;
  auto* p = static_cast<char*>(buffer);
  size_t got = 0;
  while (got < n) {
    const ssize_t r = ::read(stdout_fd_, p + got, n - got);
    if (r > 0) {
      got += static_cast<size_t>(r);
    } else if (r == 0) {
      break;
    } else if (errno != EINTR) {
      throw Error(ErrorCode::kIoError, std::string("read: ") + std::strerror(errno));
    }
  }
  return got;
}

std::string Subprocess::ReadAll() {
  std::string out;
  char buf[8192];
  for (;;) {
    const size_t n = ReadFull(buf, sizeof(buf));
    out.append(buf, n);
    if (n < sizeof(buf)) break;
  }
  return out;
}

bool Subprocess::WriteAll(const void* data, size_t n) {
  if (stdin_fd_ < 0) return false;
  const auto* p = static_cast<const char*>(data);
  size_t done = 0;
  while (done < n) {
    const ssize_t w = ::write(stdin_fd_, p + done, n - done);
    if (w > 0) {
      done += static_cast<size_t>(w);
    } else if (w < 0 && errno == EINTR) {
      continue;
    } else {
      return false;
    }
  }
  return true;
}

void Subprocess::CloseStdin() {
  if (stdin_fd_ >= 0) {
    ::close(stdin_fd_);
    stdin_fd_ = -1;
  }
}

void Subprocess::CloseStdout() {
  if (stdout_fd_ >= 0) {
    ::close(stdout_fd_);
    stdout_fd_ = -1;
  }
}

int Subprocess::Wait() {
  if (pid_ <= 0) return -1;
  if (!waited_) {
    int status = 0;
    pid_t r;
    do {
      r = ::waitpid(pid_, &status, 0);
    } while (r < 0 && errno == EINTR);
    waited_ = true;
    if (WIFEXITED(status)) {
      status_ = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
      status_ = 128 + WTERMSIG(status);
    } else {
      status_ = -1;
    }
  }
  return status_;
}

void Subprocess::Kill() {
  if (pid_ > 0 && !waited_) ::kill(pid_, SIGKILL);
}

std::string Subprocess::StderrTail(size_t max_bytes) const {
  std::ifstream in(stderr_path_, std::ios::binary | std::ios::ate);
  if (!in) return {};
  const auto size = static_cast<size_t>(in.tellg());
  const size_t start = size > max_bytes ? size - max_bytes : 0;
  in.seekg(static_cast<std::streamoff>(start));
  std::string out(size - start, '\0');
  in.read(out.data(), static_cast<std::streamsize>(out.size()));
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

}  // namespace vsum
