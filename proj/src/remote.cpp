#include <httplib.h>

#include <json.hpp>

#include "metgen/errors.hpp"
#include "metgen/modules.hpp"

namespace metgen {

namespace {

std::string normalize_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

struct SemaphoreGuard {
  std::counting_semaphore<1024>& sem;
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
};

ModuleResponse call(const std::string& base, const ModuleRequest& request, const RemoteOptions& options,
                    const std::string& request_id) {
  nlohmann::json body = {
      {"id", request_id},
      {"direction", to_string(request.direction)},
      {"rtype", to_string(request.rtype)},
      {"prefix", module_prefix(request.direction, request.rtype)},
      {"premises", {request.inputs[0].text, request.inputs[1].text}},
  };
  httplib::Client client(base);
  auto timeout = std::chrono::milliseconds(options.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Result res;
  for (int attempt = 0; attempt <= std::max(0, options.retries); ++attempt) {
    res = client.Post("/infer", body.dump(), "application/json");
    if (res) break;
  }
  if (!res) throw Error(ErrorKind::TransportError, base + "/infer: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorKind::BackendRefused, base + "/infer returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ProtocolError, std::string("response is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("id") || !reply.contains("output") || !reply.contains("confidence") ||
      !reply["output"].is_string() || !reply["confidence"].is_number()) {
    throw Error(ErrorKind::ProtocolError, "response needs string id, string output, numeric confidence");
  }
  if (reply["id"] != request_id) {
    throw Error(ErrorKind::ProtocolError, "response id " + reply["id"].dump() + " does not match " + request_id);
  }
  double confidence = reply["confidence"].get<double>();
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorKind::ProtocolError, "confidence outside [0, 1]");
  }
  return ModuleResponse{Fact{request.output_id, reply["output"].get<std::string>(), std::nullopt}, confidence};
}

}  // namespace

RemoteModule::RemoteModule(std::string endpoint, RemoteOptions options)
    : scheme_host_port_(normalize_endpoint(std::move(endpoint))),
      options_(options),
      in_flight_(std::clamp(options.max_in_flight, 1, 1024)) {}

RemoteModule::~RemoteModule() = default;

std::optional<ModuleResponse> RemoteModule::infer(const ModuleRequest& request) const {
  SemaphoreGuard guard(in_flight_);
  std::string id = "req-" + std::to_string(next_id_.fetch_add(1));
  ModuleResponse r = call(scheme_host_port_, request, options_, id);
  if (r.output.text.empty()) return std::nullopt;
  return r;
}

ModuleResponse remote_infer(const ModuleRequest& request, const std::string& endpoint, const RemoteOptions& options) {
  return call(normalize_endpoint(endpoint), request, options, "req-0");
}

}  // namespace metgen
