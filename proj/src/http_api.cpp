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

#include "vsum/http_api.hpp"

#include <fstream>
#include <map>
#include <memory>

#include "vsum/error.hpp"
#include "vsum/internal/httplib.hpp"

namespace vsum {

namespace fs = std::filesystem;

namespace {

constexpr size_t kMaxFieldBytes = 64 * 1024;
constexpr const char* kJobPath = R"(/api/v1/jobs/([0-9A-Za-z_-]+))";

int HttpStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kNotReady: return 409;
    case ErrorCode::kGone: return 410;
    case ErrorCode::kUnknownPreset:
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kUnsupportedSource:
    case ErrorCode::kSourceUnreachable:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
      return 400;
    default: return 500;
  }
}

void SendJson(httplib::Response& res, int status, const nlohmann::json& doc) {
  res.status = status;
  res.set_content(doc.dump(), "application/json");
}

void SendError(httplib::Response& res, const Error& e) {
  SendJson(res, HttpStatus(e.code()), {{"error", ToString(e.code())}, {"message", e.detail()}});
}

std::string ContentTypeFor(const fs::path& path) {
  static const std::map<std::string, std::string> kTypes = {
      {".mp4", "video/mp4"}, {".webm", "video/webm"}, {".mkv", "video/x-matroska"},
      {".mov", "video/quicktime"}, {".y4m", "video/x-yuv4mpeg"}};
  const auto it = kTypes.find(path.extension().string());
  return it == kTypes.end() ? "application/octet-stream" : it->second;
}

std::string SafeName(const std::string& name) {
  std::string out;
  for (char c : fs::path(name).filename().string()) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')
               ? c
               : '_';
  }
  return out.empty() ? "upload" : out.substr(0, 80);
}

double ParseDuration(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      size_t used = 0;
      const std::string s = v.get<std::string>();
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::logic_error&) {
    }
  }
  throw Error(ErrorCode::kInvalidSpec, "duration_sec must be a number");
}

std::optional<CustomSpecRequest> ParseCustom(const nlohmann::json& custom) {
  if (!custom.is_object()) throw Error(ErrorCode::kInvalidSpec, "custom must be an object");
  if (!custom.contains("duration_sec") || !custom.contains("aspect") ||
      !custom["aspect"].is_string()) {
    throw Error(ErrorCode::kInvalidSpec, "custom needs duration_sec and aspect \"W:H\"");
  }
  return CustomSpecRequest{ParseDuration(custom["duration_sec"]),
                           custom["aspect"].get<std::string>()};
}

// Files written while a multipart upload streams in. Removed unless the
// service adopted them.
class UploadFiles {
 public:
  explicit UploadFiles(fs::path dir) : dir_(std::move(dir)) {}
  ~UploadFiles() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }
  fs::path Create(const std::string& filename) {
    const fs::path p = dir_ / (NewJobId() + "-" + SafeName(filename));
    paths_.push_back(p);
    return p;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> paths_;
};

}  // namespace

HttpApi::HttpApi(SummaryService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  Register();
}

HttpApi::~HttpApi() { Stop(); }

void HttpApi::Register() {
  httplib::Server& s = *server_;
  s.set_payload_max_length(static_cast<size_t>(service_.config().max_upload_bytes));
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                             std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      SendError(res, e);
    } catch (const std::exception& e) {
      SendJson(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  });

  s.Get("/api/v1/presets", [this](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, PresetsToJson(service_.presets().all()));
  });

  s.Get("/api/v1/jobs", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json jobs = nlohmann::json::array();
    for (const SummaryJob& job : service_.List()) jobs.push_back(job.StatusJson());
    SendJson(res, 200, {{"jobs", jobs}});
  });

  s.Post("/api/v1/jobs", [this](const httplib::Request& req, httplib::Response& res,
                                const httplib::ContentReader& reader) {
    JobRequest request;
    UploadFiles uploads(service_.store().UploadsDir());
    if (req.is_multipart_form_data()) {
      std::map<std::string, std::string> fields;
      std::map<std::string, std::pair<fs::path, std::string>> files;
      std::string current;
      std::unique_ptr<std::ofstream> out;
      bool too_long = false;
      const bool ok = reader(
          [&](const httplib::MultipartFormData& part) {
            current = part.name;
            out.reset();
            if (!part.filename.empty()) {
              const fs::path p = uploads.Create(part.filename);
              files[part.name] = {p, part.filename};
              out = std::make_unique<std::ofstream>(p, std::ios::binary);
              return static_cast<bool>(*out);
            }
            fields[current].clear();
            return true;
          },
          [&](const char* data, size_t n) {
            if (out) {
              out->write(data, static_cast<std::streamsize>(n));
              return static_cast<bool>(*out);
            }
            std::string& field = fields[current];
            if (field.size() + n > kMaxFieldBytes) {
              too_long = true;
              return false;
            }
            field.append(data, n);
            return true;
          });
      out.reset();
      if (!ok || too_long) {
        throw Error(ErrorCode::kInvalidArgument, "malformed multipart body");
      }
      if (const auto f = files.find("file"); f != files.end()) {
        request.source = f->second.first.string();
        request.source_name = f->second.second;
        request.take_ownership = true;
      } else if (fields.count("url")) {
        request.source = fields["url"];
      }
      if (fields.count("preset") && !fields["preset"].empty()) request.preset = fields["preset"];
      if (fields.count("custom") && !fields["custom"].empty()) {
        nlohmann::json custom;
        try {
          custom = nlohmann::json::parse(fields["custom"]);
        } catch (const nlohmann::json::exception&) {
          throw Error(ErrorCode::kInvalidSpec, "custom is not valid JSON");
        }
        request.custom = ParseCustom(custom);
      } else if (fields.count("duration_sec") || fields.count("aspect")) {
        request.custom = ParseCustom({{"duration_sec", fields["duration_sec"]},
                                      {"aspect", fields["aspect"]}});
      }
      for (const auto* name : {"scores", "saliency", "shots"}) {
        std::string* slot = std::string(name) == "scores"     ? &request.sidecars.scores
                            : std::string(name) == "saliency" ? &request.sidecars.saliency
                                                              : &request.sidecars.shots;
        if (const auto f = files.find(name); f != files.end()) {
          *slot = f->second.first.string();
          request.take_ownership = true;
        } else if (fields.count(name)) {
          *slot = fields[name];
        }
      }
      if (!files.count("file") && request.source.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "multipart body needs a file or url field");
      }
    } else {
      std::string body;
      reader([&](const char* data, size_t n) {
        if (body.size() + n > kMaxFieldBytes) return false;
        body.append(data, n);
        return true;
      });
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(body);
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::kParseError, "request body is not valid JSON");
      }
      if (!doc.is_object() || !doc.contains("url") || !doc["url"].is_string()) {
        throw Error(ErrorCode::kInvalidArgument, "body needs a \"url\" string");
      }
      request.source = doc["url"].get<std::string>();
      if (!IsRemoteSource(request.source)) {
        throw Error(ErrorCode::kUnsupportedSource, "url must be an http(s) URL");
      }
      if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw Error(ErrorCode::kUnknownPreset, "bad preset");
        request.preset = doc["preset"].get<std::string>();
      }
      if (doc.contains("custom")) request.custom = ParseCustom(doc["custom"]);
      if (doc.contains("sidecars") && doc["sidecars"].is_object()) {
        const auto& sc = doc["sidecars"];
        request.sidecars.scores = sc.value("scores", "");
        request.sidecars.saliency = sc.value("saliency", "");
        request.sidecars.shots = sc.value("shots", "");
        for (const std::string* p : {&request.sidecars.scores, &request.sidecars.saliency,
                                     &request.sidecars.shots}) {
          if (!p->empty() && !IsRemoteSource(*p)) {
            throw Error(ErrorCode::kUnsupportedSource, "sidecars must be http(s) URLs");
          }
        }
      }
    }
    if (request.source.empty()) throw Error(ErrorCode::kInvalidArgument, "source is required");
    if (!request.take_ownership && !IsRemoteSource(request.source)) {
      throw Error(ErrorCode::kUnsupportedSource, "url must be an http(s) URL");
    }
    const std::string id = service_.Submit(std::move(request));
    SendJson(res, 202, {{"job_id", id}, {"status_url", "/api/v1/jobs/" + id}});
  });

  s.Get(kJobPath, [this](const httplib::Request& req, httplib::Response& res) {
    SendJson(res, 200, service_.Get(req.matches[1]).StatusJson());
  });

  s.Get(std::string(kJobPath) + "/result",
        [this](const httplib::Request& req, httplib::Response& res) {
          SendJson(res, 200, service_.Result(req.matches[1]));
        });

  s.Get(std::string(kJobPath) + "/download",
        [this](const httplib::Request& req, httplib::Response& res) {
          const std::string id = req.matches[1];
          const fs::path path = service_.DownloadPath(id);
          auto file = std::make_shared<std::ifstream>(path, std::ios::binary);
          if (!*file) throw Error(ErrorCode::kGone, "summary file is unreadable");
          const size_t size = fs::file_size(path);
          res.set_header("Content-Disposition",
                         "attachment; filename=\"summary-" + id + path.extension().string() +
                             "\"");
          res.set_content_provider(
              size, ContentTypeFor(path),
              [file](size_t offset, size_t length, httplib::DataSink& sink) {
                char buf[64 * 1024];
                file->clear();
                file->seekg(static_cast<std::streamoff>(offset));
                size_t left = length;
                while (left > 0) {
                  const size_t want = std::min(left, sizeof(buf));
                  file->read(buf, static_cast<std::streamsize>(want));
                  const auto got = static_cast<size_t>(file->gcount());
                  if (got == 0) return false;
                  if (!sink.write(buf, got)) return false;
                  left -= got;
                }
                return true;
              });
        });

  s.Delete(kJobPath, [this](const httplib::Request& req, httplib::Response& res) {
    SendJson(res, 200, service_.Delete(req.matches[1]).StatusJson());
  });

  const fs::path& static_dir = service_.config().static_dir;
  if (!static_dir.empty() && fs::is_directory(static_dir)) {
    s.set_mount_point("/", static_dir.string());
  }
}

int HttpApi::Bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    if (port_ <= 0) throw Error(ErrorCode::kIoError, "cannot bind " + host);
  } else {
    if (!server_->bind_to_port(host, port)) {
      throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  return port_;
}

void HttpApi::Serve() { server_->listen_after_bind(); }

int HttpApi::StartInBackground(const std::string& host, int port) {
  const int bound = Bind(host, port);
  thread_ = std::thread([this] { Serve(); });
  server_->wait_until_ready();
  return bound;
}

void HttpApi::Stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace vsum
