// Copyright 2026 The natbias Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>
#include "natbias/embedding.h"
#include "natbias/error.h"

namespace natbias {
namespace {

using json = nlohmann::json;

Error TransportError(const std::string& message) {
  return Error(ErrorKind::kTransport, "external encoder: " + message);
}

}  // namespace

ExternalEncoder::ExternalEncoder(std::vector<std::string> argv,
                                 std::string mask_token, std::size_t dimension)
    : Encoder(std::move(mask_token)),
      argv_(std::move(argv)),
      dimension_(dimension) {
  if (argv_.empty()) throw ValidationError("external encoder needs a command");
  // A socket pair rather than two pipes: send() with MSG_NOSIGNAL reports a
  // dead child as EPIPE instead of raising SIGPIPE.
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw TransportError(std::string("socketpair: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw TransportError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    dup2(fds[1], STDIN_FILENO);
    dup2(fds[1], STDOUT_FILENO);
    std::vector<char*> args;
    for (std::string& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(fds[1]);
  fd_ = fds[0];
  pid_ = pid;
}

ExternalEncoder::~ExternalEncoder() { Shutdown(); }

void ExternalEncoder::Shutdown() {
  if (fd_ >= 0) {
    shutdown(fd_, SHUT_RDWR);
    close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::size_t ExternalEncoder::dimension() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return dimension_;
}

EmbeddingVector ExternalEncoder::Encode(std::string_view text) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (fd_ < 0) throw TransportError("process not running");
  const uint64_t id = next_id_++;
  json request = json::object();
  request["id"] = id;
  request["text"] = std::string(text);
  const std::string line = request.dump() + "\n";

  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n =
        send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("write failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }

  std::size_t newline;
  while ((newline = read_buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw TransportError("process closed its output");
    read_buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string reply = read_buffer_.substr(0, newline);
  read_buffer_.erase(0, newline + 1);

  EmbeddingVector vector;
  try {
    const json response = json::parse(reply);
    if (response.at("id").get<uint64_t>() != id) {
      throw TransportError("response id does not match request " +
                           std::to_string(id));
    }
    vector.values = response.at("vector").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed response: ") + e.what());
  }
  for (const double x : vector.values) {
    if (!std::isfinite(x)) throw TransportError("non-finite vector value");
  }
  if (dimension_ == 0) dimension_ = vector.dimension();
  if (vector.dimension() != dimension_ || dimension_ == 0) {
    throw TransportError("vector of dimension " +
                         std::to_string(vector.dimension()) + ", expected " +
                         std::to_string(dimension_));
  }
  return vector;
}

}  // namespace natbias
