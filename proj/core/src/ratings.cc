#include "sentplan/ratings.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sentplan {
namespace fs = std::filesystem;
namespace {

std::string errno_text(const std::string& what) { return what + ": " + std::strerror(errno); }

struct Replay {
  std::vector<RatingRecord> records;
  std::size_t complete_bytes = 0;
  bool torn = false;
};

Replay replay(const std::string& text) {
  Replay out;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      out.torn = true;
      break;
    }
    ++line_no;
    const std::string_view line(text.data() + start, nl - start);
    if (!line.empty()) {
      try {
        out.records.push_back(parse_rating_line(line));
      } catch (const RatingError& e) {
        throw RatingError("rating log line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = nl + 1;
    out.complete_bytes = start;
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string> check_record(const RatingRecord& r) {
  std::vector<std::string> errors;
  if (r.user.empty()) errors.push_back("user: must be non-empty");
  if (r.user == kAverageUser) errors.push_back("user: 'AVG' is reserved");
  if (r.plan.empty()) errors.push_back("plan-id: must be non-empty");
  if (r.alt.empty()) errors.push_back("alt-id: must be non-empty");
  if (r.rating < 1 || r.rating > 5) {
    errors.push_back("rating: must be an integer from 1 to 5, got " + std::to_string(r.rating));
  }
  return errors;
}

std::string to_line(const RatingRecord& r) {
  nlohmann::json j = {
      {"ts", r.ts}, {"user", r.user}, {"plan", r.plan}, {"alt", r.alt}, {"rating", r.rating}};
  return j.dump();
}

RatingRecord parse_rating_line(std::string_view line) {
  RatingRecord r;
  try {
    const auto j = nlohmann::json::parse(line);
    r.ts = j.at("ts").get<std::int64_t>();
    r.user = j.at("user").get<std::string>();
    r.plan = j.at("plan").get<std::string>();
    r.alt = j.at("alt").get<std::string>();
    if (!j.at("rating").is_number_integer()) throw RatingError("rating is not an integer");
    r.rating = j.at("rating").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw RatingError(e.what());
  }
  const auto errors = check_record(r);
  if (!errors.empty()) throw RatingError(errors.front());
  return r;
}

RatingLog::RatingLog(fs::path path) : path_(std::move(path)) {
  const bool existed = fs::exists(path_);
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw RatingError(errno_text("cannot open " + path_.string()));
  try {
    const Replay r = replay(slurp(path_));
    if (r.torn) {
      torn_tail_ = true;
      if (::ftruncate(fd_, static_cast<off_t>(r.complete_bytes)) != 0) {
        throw RatingError(errno_text("cannot truncate torn tail of " + path_.string()));
      }
      ::fsync(fd_);
    }
    for (const auto& rec : r.records) view_[{rec.user, rec.plan, rec.alt}] = rec;
    lines_ = r.records.size();
  } catch (...) {
    ::close(fd_);
    throw;
  }
  if (!existed) {
    const int dir = ::open(path_.parent_path().empty() ? "." : path_.parent_path().c_str(),
                           O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dir >= 0) {
      ::fsync(dir);
      ::close(dir);
    }
  }
}

RatingLog::~RatingLog() {
  if (fd_ >= 0) ::close(fd_);
}

void RatingLog::append(const RatingRecord& r) {
  const auto errors = check_record(r);
  if (!errors.empty()) throw RatingError(errors.front());
  const std::string line = to_line(r) + "\n";
  std::lock_guard lock(mu_);
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw RatingError(errno_text("write to " + path_.string()));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw RatingError(errno_text("fsync " + path_.string()));
  view_[{r.user, r.plan, r.alt}] = r;
  ++lines_;
}

std::vector<RatingRecord> RatingLog::latest() const {
  std::lock_guard lock(mu_);
  std::vector<RatingRecord> out;
  out.reserve(view_.size());
  for (const auto& [k, r] : view_) out.push_back(r);
  return out;
}

std::vector<RatingRecord> RatingLog::latest_for(std::string_view user) const {
  std::lock_guard lock(mu_);
  std::vector<RatingRecord> out;
  for (const auto& [k, r] : view_) {
    if (r.user == user) out.push_back(r);
  }
  return out;
}

std::set<std::string> RatingLog::users() const {
  std::lock_guard lock(mu_);
  std::set<std::string> out;
  for (const auto& [k, r] : view_) out.insert(r.user);
  return out;
}

std::size_t RatingLog::records() const {
  std::lock_guard lock(mu_);
  return lines_;
}

std::vector<RatingRecord> read_ratings(const fs::path& path) {
  if (!fs::exists(path)) return {};
  std::map<RatingKey, RatingRecord> view;
  for (const auto& rec : replay(slurp(path)).records) view[{rec.user, rec.plan, rec.alt}] = rec;
  std::vector<RatingRecord> out;
  for (const auto& [k, r] : view) out.push_back(r);
  return out;
}

Ratings ratings_for(const std::vector<RatingRecord>& records, const std::vector<RowId>& rows,
                    const std::string& user) {
  const bool average = user == kAverageUser;
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> sums;
  bool known = average;
  for (const auto& r : records) {
    if (!average && r.user != user) continue;
    known = true;
    auto& s = sums[{r.plan, r.alt}];
    s.first += r.rating;
    s.second += 1;
  }
  if (!known) throw RatingError("no ratings from user '" + user + "'");
  Ratings out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    auto it = sums.find({row.plan_id, row.alt_id});
    if (it == sums.end()) {
      out.push_back(std::nullopt);
    } else {
      out.push_back(it->second.first / it->second.second);
    }
  }
  return out;
}

std::vector<RatingRecord> dangling_ratings(const std::vector<RatingRecord>& records,
                                           const Corpus& corpus) {
  std::set<std::pair<std::string, std::string>> ids;
  for (const auto& a : corpus.alternatives) ids.insert({a.plan_id, a.alt_id});
  std::vector<RatingRecord> out;
  for (const auto& r : records) {
    if (!ids.count({r.plan, r.alt})) out.push_back(r);
  }
  return out;
}

}  // namespace sentplan
