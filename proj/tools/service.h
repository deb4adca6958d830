#pragma once

// HTTP service for collecting ratings over a generated corpus and training
// models on demand. Ratings go to the corpus's append-only log before the
// request is acknowledged.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sentplan/corpus.h"
#include "commands.h"
#include "sentplan/ratings.h"

namespace httplib {
class Server;
}

namespace sentplan::cli {

struct ServeArgs {
  std::filesystem::path corpus;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
};

struct TrainJob {
  std::string id;
  std::string user;
  int rounds = 100;
  std::string status = "queued";  // queued, running, done, failed
  std::string model_id;
  std::size_t pairs = 0;
  double rank_loss = 0;
  std::string error;
};

class Service {
 public:
  explicit Service(std::filesystem::path corpus_dir);
  ~Service();

  // Binds and returns the port. Throws if the address is unavailable.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

  // Shuffled presentation order for one user session.
  std::vector<const AlternativeRecord*> presentation(const std::string& plan_id,
                                                     const std::string& user,
                                                     const std::string& session) const;

 private:
  void routes();
  std::string start_job(const std::string& user, int rounds, FeatureSet features);

  std::filesystem::path dir_;
  Corpus corpus_;
  std::map<std::string, std::vector<const AlternativeRecord*>> by_plan_;
  RatingLog log_;
  std::unique_ptr<httplib::Server> server_;

  std::mutex jobs_mu_;
  std::map<std::string, TrainJob> jobs_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
  std::atomic<std::uint64_t> next_job_{1};
};

int run_serve(const ServeArgs& args, std::ostream& out);

}  // namespace sentplan::cli
