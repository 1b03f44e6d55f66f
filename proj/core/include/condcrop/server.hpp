#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "condcrop/service.hpp"

namespace condcrop {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path static_dir;
  std::size_t max_upload_bytes = kMaxUploadBytes;
};

/// HTTP front end:
///   GET  /v1/health   -> 200 "ok"
///   POST /v1/crop     -> CropResponse JSON; body is a JSON CropRequest, or
///                        multipart with a "request" JSON part and a
///                        "heatmap" or "image" file part
///   POST /v1/heatmap  -> PNG saliency map of an uploaded image
/// Errors: 400 malformed input, 413 oversized upload, 422 infeasible constraints.
class CropServer {
 public:
  explicit CropServer(ServerOptions options);
  ~CropServer();
  CropServer(const CropServer&) = delete;
  CropServer& operator=(const CropServer&) = delete;

  /// Binds options.port (0 picks a free port) and returns the bound port, or -1.
  int bind();
  /// Serves until stop(); call after bind().
  bool listen_after_bind();
  /// bind() + listen_after_bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace condcrop
