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

#ifndef VSUM_SUBPROCESS_HPP_
#define VSUM_SUBPROCESS_HPP_

#include <sys/types.h>

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vsum {

// Splits a command template on whitespace (single and double quotes group)
// and substitutes {name} placeholders inside each token. No shell is
// involved, so substituted values never need escaping.
std::vector<std::string> ExpandCommandTemplate(
    std::string_view command_template,
    const std::map<std::string, std::string>& vars);

// A child process with optional stdin/stdout pipes. Stderr always goes to a
// private temporary file so a chatty child can never block on it.
class Subprocess {
 public:
  struct Options {
    bool pipe_stdin = false;
    bool pipe_stdout = false;
  };

  // Throws Error(kTranscoderFailure) when the executable cannot be started.
  Subprocess(const std::vector<std::string>& argv, Options options);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Reads up to n bytes, stopping early only at EOF. Returns bytes read.
  size_t ReadFull(void* buffer, size_t n);
  std::string ReadAll();

  // Returns false when the child has closed its end (EPIPE).
  bool WriteAll(const void* data, size_t n);

  void CloseStdin();
  void CloseStdout();

  // Exit status; 128 + signal number for signalled children.
  int Wait();
  void Kill();

  // Tail of everything the child wrote to stderr.
  std::string StderrTail(size_t max_bytes = 4096) const;

  const std::string& program() const { return program_; }

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  bool waited_ = false;
  int status_ = 0;
  std::filesystem::path stderr_path_;
  std::string program_;
};

}  // namespace vsum

#endif  // VSUM_SUBPROCESS_HPP_
