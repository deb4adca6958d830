#include "service.h"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sentplan/random.h"

namespace sentplan::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Field diagnostics for a rating body; fills r on success.
std::vector<std::string> parse_rating_body(const std::string& body, RatingRecord& r) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return {std::string("body: not valid JSON (") + e.what() + ")"};
  }
  if (!j.is_object()) return {"body: expected an object"};
  std::vector<std::string> errors;
  auto text = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) {
      errors.push_back(std::string(key) + ": missing");
    } else if (!j[key].is_string()) {
      errors.push_back(std::string(key) + ": must be a string");
    } else {
      dst = j[key].get<std::string>();
    }
  };
  text("user", r.user);
  text("plan-id", r.plan);
  text("alt-id", r.alt);
  if (!j.contains("rating")) {
    errors.push_back("rating: missing");
  } else if (!j["rating"].is_number_integer()) {
    errors.push_back("rating: must be an integer from 1 to 5");
  } else {
    const auto v = j["rating"].get<std::int64_t>();
    r.rating = v < 0 || v > 100 ? 0 : static_cast<int>(v);
    if (v < 1 || v > 5) {
      errors.push_back("rating: must be an integer from 1 to 5, got " + std::to_string(v));
    }
  }
  if (errors.empty()) {
    for (auto& e : check_record(r)) errors.push_back(std::move(e));
  }
  return errors;
}

json job_json(const TrainJob& job) {
  json j = {{"job-id", job.id}, {"user", job.user}, {"rounds", job.rounds},
            {"status", job.status}};
  if (job.status == "done") {
    j["model-id"] = job.model_id;
    j["pairs"] = job.pairs;
    j["rank-loss"] = job.rank_loss;
  }
  if (job.status == "failed") j["error"] = job.error;
  return j;
}

}  // namespace

Service::Service(fs::path corpus_dir)
    : dir_(std::move(corpus_dir)),
      corpus_(load_corpus(dir_)),
      log_(ratings_path(dir_)),
      server_(std::make_unique<httplib::Server>()) {
  for (const auto& a : corpus_.alternatives) by_plan_[a.plan_id].push_back(&a);
  routes();
}

Service::~Service() {
  stop();
  std::lock_guard lock(workers_mu_);
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
}

int Service::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host)
                              : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_) server_->stop();
}

std::vector<const AlternativeRecord*> Service::presentation(const std::string& plan_id,
                                                            const std::string& user,
                                                            const std::string& session) const {
  auto it = by_plan_.find(plan_id);
  if (it == by_plan_.end()) return {};
  std::vector<const AlternativeRecord*> out = it->second;
  Rng rng(mix_seed(mix_seed(hash_string(user), hash_string(plan_id)), hash_string(session)));
  shuffle(std::span(out), rng);
  return out;
}

std::string Service::start_job(const std::string& user, int rounds, FeatureSet features) {
  const std::string id = "job-" + std::to_string(next_job_++);
  {
    std::lock_guard lock(jobs_mu_);
    TrainJob job;
    job.id = id;
    job.user = user;
    job.rounds = rounds;
    jobs_[id] = job;
  }
  std::lock_guard workers_lock(workers_mu_);
  workers_.emplace_back([this, id, user, rounds, features] {
    {
      std::lock_guard lock(jobs_mu_);
      jobs_[id].status = "running";
    }
    TrainJob result;
    try {
      const TrainOutcome t = train_model(corpus_, log_.latest(), user, rounds, 0, features);
      save_model(t.model, user, models_dir(dir_) / (t.model_id + ".json"));
      result.status = "done";
      result.model_id = t.model_id;
      result.pairs = t.pairs;
      result.rank_loss = t.rank_loss;
    } catch (const std::exception& e) {
      result.status = "failed";
      result.error = e.what();
    }
    std::lock_guard lock(jobs_mu_);
    TrainJob& job = jobs_[id];
    job.status = result.status;
    job.model_id = result.model_id;
    job.pairs = result.pairs;
    job.rank_loss = result.rank_loss;
    job.error = result.error;
  });
  return id;
}

void Service::routes() {
  auto& s = *server_;

  s.Get("/api/plans", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("user")) return fail(res, 400, "user: missing query parameter");
    const std::string user = req.get_param_value("user");
    std::set<std::pair<std::string, std::string>> rated;
    for (const auto& r : log_.latest_for(user)) rated.insert({r.plan, r.alt});
    json out = json::array();
    for (const auto& p : corpus_.plans) {
      const auto& alts = by_plan_.at(p.plan_id);
      const bool all = std::all_of(alts.begin(), alts.end(), [&](const AlternativeRecord* a) {
        return rated.count({a->plan_id, a->alt_id}) > 0;
      });
      out.push_back({{"plan-id", p.plan_id},
                     {"strategy", std::string(to_string(p.strategy))},
                     {"alternatives", alts.size()},
                     {"rated", all}});
    }
    reply(res, 200, out);
  });

  s.Get(R"(/api/plans/([^/]+)/alternatives)",
        [this](const httplib::Request& req, httplib::Response& res) {
          const std::string plan = req.matches[1];
          if (!by_plan_.count(plan)) return fail(res, 404, "unknown plan " + plan);
          if (!req.has_param("user")) return fail(res, 400, "user: missing query parameter");
          const std::string session =
              req.has_param("session") ? req.get_param_value("session") : "";
          json out = json::array();
          for (const auto* a : presentation(plan, req.get_param_value("user"), session)) {
            out.push_back({{"alt-id", a->alt_id}, {"text", a->text}});
          }
          reply(res, 200, out);
        });

  s.Post("/api/ratings", [this](const httplib::Request& req, httplib::Response& res) {
    RatingRecord r;
    const auto errors = parse_rating_body(req.body, r);
    if (!errors.empty()) return reply(res, 400, {{"errors", errors}});
    if (!corpus_.find_plan(r.plan)) return fail(res, 404, "unknown plan " + r.plan);
    if (!corpus_.find(r.plan, r.alt)) {
      return fail(res, 404, "unknown alternative " + r.alt + " of plan " + r.plan);
    }
    r.ts = now_seconds();
    try {
      log_.append(r);
    } catch (const std::exception& e) {
      return fail(res, 500, e.what());
    }
    reply(res, 200, {{"ok", true}, {"ts", r.ts}});
  });

  s.Get("/api/ratings", [this](const httplib::Request& req, httplib::Response& res) {
    const auto records = req.has_param("user") ? log_.latest_for(req.get_param_value("user"))
                                               : log_.latest();
    json out = json::array();
    for (const auto& r : records) out.push_back(json::parse(to_line(r)));
    reply(res, 200, out);
  });

  s.Post("/api/train", [this](const httplib::Request& req, httplib::Response& res) {
    json j;
    try {
      j = json::parse(req.body.empty() ? "{}" : req.body);
    } catch (const json::parse_error& e) {
      return reply(res, 400, {{"errors", {std::string("body: not valid JSON (") + e.what() + ")"}}});
    }
    std::vector<std::string> errors;
    std::string user = kAverageUser;
    int rounds = 100;
    FeatureSet features = FeatureSet::kAll;
    if (!j.is_object()) errors.push_back("body: expected an object");
    if (errors.empty() && j.contains("user")) {
      if (j["user"].is_string() && !j["user"].get<std::string>().empty()) {
        user = j["user"].get<std::string>();
      } else {
        errors.push_back("user: must be a non-empty string");
      }
    }
    if (errors.empty() && j.contains("rounds")) {
      if (j["rounds"].is_number_integer() && j["rounds"].get<std::int64_t>() > 0 &&
          j["rounds"].get<std::int64_t>() <= 10000) {
        rounds = j["rounds"].get<int>();
      } else {
        errors.push_back("rounds: must be an integer from 1 to 10000");
      }
    }
    if (errors.empty() && j.contains("features")) {
      auto f = j["features"].is_string()
                   ? parse_feature_set(j["features"].get<std::string>())
                   : std::nullopt;
      if (f) {
        features = *f;
      } else {
        errors.push_back("features: must be one of all, ngram, concept, tree");
      }
    }
    if (!errors.empty()) return reply(res, 400, {{"errors", errors}});
    if (user != kAverageUser && log_.latest_for(user).empty()) {
      return fail(res, 404, "no ratings from user " + user);
    }
    reply(res, 202, {{"job-id", start_job(user, rounds, features)}});
  });

  s.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(jobs_mu_);
    auto it = jobs_.find(req.matches[1]);
    if (it == jobs_.end()) return fail(res, 404, "unknown job " + std::string(req.matches[1]));
    reply(res, 200, job_json(it->second));
  });

  s.Get("/api/models", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    const fs::path dir = models_dir(dir_);
    std::vector<fs::path> files;
    if (fs::is_directory(dir)) {
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      try {
        std::ifstream in(f);
        const json j = json::parse(in);
        out.push_back({{"model-id", f.stem().string()},
                       {"user", j.value("user", "")},
                       {"features", j.value("feature_set", "")},
                       {"rounds", j.value("rounds", 0)},
                       {"rules", j.at("rules").size()}});
      } catch (const std::exception&) {
        continue;  // half-written or foreign file
      }
    }
    reply(res, 200, out);
  });

  s.Get(R"(/api/models/([^/]+)/rules)", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    const std::string id = req.matches[1];
    if (id.find("..") != std::string::npos) return fail(res, 400, "bad model id");
    const fs::path path = models_dir(dir_) / (id + ".json");
    if (!fs::exists(path)) return fail(res, 404, "unknown model " + id);
    std::size_t limit = 20;
    if (req.has_param("limit")) {
      try {
        limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::exception&) {
        return fail(res, 400, "limit: must be a non-negative integer");
      }
    }
    RankModel model;
    try {
      model = load_model(path);
    } catch (const std::exception& e) {
      return fail(res, 500, e.what());
    }
    auto rules = model.rules;
    std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
      return std::abs(a.alpha) > std::abs(b.alpha);
    });
    if (rules.size() > limit) rules.resize(limit);
    std::stable_sort(rules.begin(), rules.end(),
                     [](const Rule& a, const Rule& b) { return a.alpha < b.alpha; });
    json out = json::array();
    for (const auto& r : rules) {
      out.push_back({{"feature", r.feature},
                     {"threshold", std::isinf(r.threshold) ? json("-inf") : json(r.threshold)},
                     {"alpha", r.alpha}});
    }
    reply(res, 200, out);
  });
}

int run_serve(const ServeArgs& args, std::ostream& out) {
  // SIGINT/SIGTERM are taken by a waiting thread, which stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(args.corpus);
  const int port = service.bind(args.host, args.port);
  std::atomic<bool> done{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (!done) service.stop();
  });
  out << "listening on http://" << args.host << ":" << port << std::endl;
  service.listen();
  done = true;
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace sentplan::cli
