#include <csignal>
#include <iostream>
#include <thread>

#include <pthread.h>

#include <httplib.h>

#include "cmf/service.hpp"

namespace cmf {

namespace {

void respond(const Service& service, const httplib::Request& req, httplib::Response& res) {
  const auto api = service.handle(req.method, req.path, req.body);
  res.status = api.status;
  res.set_content(api.text(), "application/json");
}

}  // namespace

int run_server(Service& service, const ServerOptions& options) {
  // Block the control signals before any worker thread exists so that only
  // the watcher below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGHUP);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  server.Get(R"(/api/.*)", [&](const httplib::Request& req, httplib::Response& res) { respond(service, req, res); });
  server.Post(R"(/api/.*)", [&](const httplib::Request& req, httplib::Response& res) { respond(service, req, res); });
  if (options.static_dir && !server.set_mount_point("/", options.static_dir->string())) {
    std::cerr << "static directory not found: " << options.static_dir->string() << "\n";
    return 1;
  }

  std::thread watcher([&] {
    while (true) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (sig == SIGHUP) {
        try {
          service.reload();
          std::cerr << "catalog reloaded\n";
        } catch (const std::exception& e) {
          std::cerr << "reload failed, keeping previous catalog:\n" << e.what() << "\n";
        }
        continue;
      }
      server.stop();
      return;
    }
  });

  std::cerr << "listening on http://" << options.host << ":" << options.port << "\n";
  const bool ok = server.listen(options.host, options.port);
  if (!ok) {
    std::cerr << "cannot listen on " << options.host << ":" << options.port << "\n";
    pthread_kill(watcher.native_handle(), SIGTERM);
  }
  watcher.join();
  return ok ? 0 : 1;
}

}  // namespace cmf
