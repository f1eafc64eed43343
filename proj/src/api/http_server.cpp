#include "consent/api/http_server.hpp"

#include <httplib.h>

#include "consent/common/error.hpp"

namespace consent::api {

namespace {

std::string bearerToken(const httplib::Request& req) {
  auto header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() > kPrefix.size() && header.compare(0, kPrefix.size(), kPrefix) == 0) {
    return header.substr(kPrefix.size());
  }
  return {};
}

void respond(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(canonicalSerialize(api.body), "application/json");
}

// Empty bodies decode as an empty object so field checks report them.
std::optional<Json> decodeBody(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return Json::object();
  try {
    return parseCanonical(req.body);
  } catch (const Error&) {
    respond(res, apiError(400, "bad-request", "request body is not valid JSON"));
    return std::nullopt;
  }
}

}  // namespace

HttpServer::HttpServer(Gateway& gateway, std::optional<std::filesystem::path> staticDir)
    : gateway_(gateway), server_(std::make_unique<httplib::Server>()) {
  routes();
  if (staticDir) server_->set_mount_point("/", staticDir->string());
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  auto& s = *server_;
  using Req = const httplib::Request&;
  using Res = httplib::Response&;

  s.Post("/api/users", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) respond(res, gateway_.registerUser(*body));
  });
  s.Delete("/api/users/me", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) respond(res, gateway_.deleteAccount(bearerToken(req), *body));
  });
  s.Post("/api/companies", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) respond(res, gateway_.registerCompany(*body));
  });
  s.Get("/api/companies", [this](Req req, Res res) {
    respond(res, gateway_.listCompanies(bearerToken(req)));
  });
  s.Put("/api/companies/me/profile", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) respond(res, gateway_.putCompanyProfile(bearerToken(req), *body));
  });
  s.Get("/api/admin/companies", [this](Req req, Res res) {
    respond(res, gateway_.adminListCompanies(bearerToken(req)));
  });
  s.Post(R"(/api/admin/companies/([^/]+)/accredit)", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) {
      respond(res, gateway_.accredit(bearerToken(req), req.matches[1].str(), *body));
    }
  });
  s.Post("/api/sessions", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) respond(res, gateway_.login(*body));
  });
  s.Delete("/api/sessions", [this](Req req, Res res) {
    respond(res, gateway_.logout(bearerToken(req)));
  });
  s.Get("/api/me", [this](Req req, Res res) { respond(res, gateway_.me(bearerToken(req))); });
  s.Get("/api/permissions", [this](Req req, Res res) {
    respond(res, gateway_.listPermissions(bearerToken(req)));
  });
  s.Put(R"(/api/permissions/([^/]+))", [this](Req req, Res res) {
    if (auto body = decodeBody(req, res)) {
      respond(res, gateway_.putPermission(bearerToken(req), req.matches[1].str(), *body));
    }
  });
  s.Get(R"(/api/permissions/([^/]+)/history)", [this](Req req, Res res) {
    respond(res, gateway_.permissionHistory(bearerToken(req), req.matches[1].str()));
  });
  s.Get("/api/company/data", [this](Req req, Res res) {
    respond(res, gateway_.companyData(bearerToken(req)));
  });
}

bool HttpServer::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpServer::bindAnyPort(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::serveBound() { return server_->listen_after_bind(); }

void HttpServer::waitUntilReady() const { server_->wait_until_ready(); }

void HttpServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace consent::api
