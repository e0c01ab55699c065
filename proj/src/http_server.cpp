#include <httplib.h>

#include "secstate/service.hpp"

namespace secstate {

struct HttpServer::Impl {
    Api& api;
    httplib::Server server;

    explicit Impl(Api& a) : api(a) {
        auto route = [this](const httplib::Request& req, httplib::Response& res) {
            std::map<std::string, std::string> query;
            for (const auto& [k, v] : req.params) query.emplace(k, v);
            ApiResponse out = api.handle(req.method, req.path, query, req.body);
            res.status = out.status;
            res.set_content(out.body.dump(), "application/json");
        };
        const std::string any = R"(/.*)";
        server.Get(any, route);
        server.Post(any, route);
        server.Put(any, route);
        server.Delete(any, route);
    }
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::UsageError, "cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::UsageError, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

} // namespace secstate
