#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "revsel/corpus.hpp"
#include "revsel/review_session.hpp"

namespace revsel {

// Persists sessions as their saved JSON blobs.
class SessionStore {
 public:
  virtual ~SessionStore() = default;
  virtual void put(const std::string& session_id, const std::string& blob) = 0;
  virtual void remove(const std::string& session_id) = 0;
  // Every stored blob, keyed by session id.
  virtual std::map<std::string, std::string> load_all() const = 0;
};

class MemorySessionStore final : public SessionStore {
 public:
  void put(const std::string& session_id, const std::string& blob) override;
  void remove(const std::string& session_id) override;
  std::map<std::string, std::string> load_all() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> blobs_;
};

// One `<session_id>.json` file per session; writes go through a temporary
// file and a rename.
class DirectorySessionStore final : public SessionStore {
 public:
  explicit DirectorySessionStore(std::filesystem::path dir);

  void put(const std::string& session_id, const std::string& blob) override;
  void remove(const std::string& session_id) override;
  std::map<std::string, std::string> load_all() const override;

 private:
  std::filesystem::path dir_;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  std::string cors_origin;  // empty disables the CORS header
};

// JSON-over-HTTP front end. Requests for one session are applied one at a
// time; different sessions proceed in parallel over the shared index.
class ApiService {
 public:
  ApiService(std::shared_ptr<const CorpusIndex> index,
             std::shared_ptr<SessionStore> store, ServiceConfig config = {});
  ~ApiService();

  ApiService(const ApiService&) = delete;
  ApiService& operator=(const ApiService&) = delete;

  // Binds the listening socket and returns the bound port. Throws kIoError
  // when the address cannot be bound.
  int bind();
  // Serves until stop(). Requires bind().
  void serve();
  // bind() and serve() on a background thread.
  int start();
  void stop();
  int port() const;

  // Sessions that could not be restored from the store at startup.
  const std::vector<std::string>& load_failures() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace revsel
