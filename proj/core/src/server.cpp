#include "condcrop/server.hpp"

#include <httplib.h>

#include "condcrop/error.hpp"
#include "condcrop/image_io.hpp"

namespace condcrop {
namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InfeasibleSearchSpace:
    case ErrorKind::EmptyProposalSet:
    case ErrorKind::StepOutOfRange:
      return 422;
    case ErrorKind::Io:
      return 500;
    default:
      return 400;
  }
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

void handle_crop(const httplib::Request& req, httplib::Response& res) {
  nlohmann::json body;
  std::optional<HeatmapSource> upload;
  if (req.is_multipart_form_data()) {
    if (!req.has_file("request")) return send_error(res, 400, "multipart crop needs a 'request' part");
    body = nlohmann::json::parse(req.get_file_value("request").content);
    if (req.has_file("heatmap")) {
      upload = source_from_heatmap_bytes(as_bytes(req.get_file_value("heatmap").content));
    } else if (req.has_file("image")) {
      upload = source_from_image(decode_image(as_bytes(req.get_file_value("image").content)));
    }
  } else {
    body = nlohmann::json::parse(req.body);
  }
  const CropRequest request = parse_crop_request(body, std::move(upload));
  const CropResponse response = run_crop(request);
  res.set_content(response_to_json(response).dump(), "application/json");
}

void handle_heatmap(const httplib::Request& req, httplib::Response& res) {
  const std::string& payload = req.is_multipart_form_data() ? req.get_file_value("image").content : req.body;
  if (payload.empty()) return send_error(res, 400, "no image supplied");
  Dims out = kDefaultHeatmapDims;
  if (req.has_param("width")) out.width = std::stoi(req.get_param_value("width"));
  if (req.has_param("height")) out.height = std::stoi(req.get_param_value("height"));
  if (!out.valid() || out.width > kMaxScoringGrid || out.height > kMaxScoringGrid) {
    return send_error(res, 400, "heatmap size must be within 1..256");
  }
  const Heatmap saliency = heuristic_saliency(decode_image(as_bytes(payload)), out);
  const auto png = encode_png(heatmap_to_image(saliency));
  res.set_content(std::string(png.begin(), png.end()), "image/png");
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, std::string("malformed JSON: ") + e.what());
    } catch (const std::logic_error& e) {
      send_error(res, 400, e.what());
    }
  };
}

}  // namespace

struct CropServer::Impl {
  ServerOptions options;
  httplib::Server server;
};

CropServer::CropServer(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  auto& svr = impl_->server;
  svr.set_payload_max_length(impl_->options.max_upload_bytes);
  svr.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  svr.Post("/v1/crop", guarded(handle_crop));
  svr.Post("/v1/heatmap", guarded(handle_heatmap));
  if (!impl_->options.static_dir.empty()) svr.set_mount_point("/", impl_->options.static_dir.string());
}

CropServer::~CropServer() { stop(); }

int CropServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    o.port = impl_->server.bind_to_any_port(o.host);
    return o.port;
  }
  return impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
}

bool CropServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

bool CropServer::listen() { return bind() >= 0 && listen_after_bind(); }

void CropServer::stop() {
  if (impl_) impl_->server.stop();
}

void CropServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace condcrop
