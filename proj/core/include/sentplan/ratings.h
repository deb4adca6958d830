#pragma once

// Human ratings: an append-only log of {ts, user, plan, alt, rating} records,
// one JSON object per line. A later record for the same (user, plan, alt)
// supersedes earlier ones; the log keeps both.

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "sentplan/corpus.h"
#include "sentplan/evaluation.h"

namespace sentplan {

class RatingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RatingRecord {
  std::int64_t ts = 0;  // UTC seconds
  std::string user;
  std::string plan;
  std::string alt;
  int rating = 0;
  bool operator==(const RatingRecord&) const = default;
};

// Empty when the record is well-formed; otherwise one message per field.
std::vector<std::string> check_record(const RatingRecord& r);

std::string to_line(const RatingRecord& r);
RatingRecord parse_rating_line(std::string_view line);

using RatingKey = std::tuple<std::string, std::string, std::string>;  // user, plan, alt

class RatingLog {
 public:
  // Replays the file if present. A torn final line (no newline) from a
  // crash is ignored and truncated away; any other bad line throws.
  explicit RatingLog(std::filesystem::path path);
  ~RatingLog();
  RatingLog(const RatingLog&) = delete;
  RatingLog& operator=(const RatingLog&) = delete;

  // Durable on return: the line is written and fsync'ed.
  void append(const RatingRecord& r);

  std::vector<RatingRecord> latest() const;
  std::vector<RatingRecord> latest_for(std::string_view user) const;
  std::set<std::string> users() const;
  std::size_t records() const;  // lines in the log, superseded included
  bool torn_tail() const { return torn_tail_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::map<RatingKey, RatingRecord> view_;
  std::size_t lines_ = 0;
  bool torn_tail_ = false;
};

// Reads the log without opening it for writing.
std::vector<RatingRecord> read_ratings(const std::filesystem::path& path);

inline constexpr const char* kAverageUser = "AVG";

// Ratings aligned with matrix rows, for one user or the per-alternative
// mean over all users (kAverageUser). Throws RatingError for an unknown
// user.
Ratings ratings_for(const std::vector<RatingRecord>& records, const std::vector<RowId>& rows,
                    const std::string& user);

// Ratings that refer to no alternative of the corpus.
std::vector<RatingRecord> dangling_ratings(const std::vector<RatingRecord>& records,
                                           const Corpus& corpus);

}  // namespace sentplan
