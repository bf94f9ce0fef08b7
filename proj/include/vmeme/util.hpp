#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vmeme {

// Base for every error raised by the library. Subclasses let callers react to
// the failure category without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

constexpr double kSecondsPerDay = 86400.0;

// Parses ISO-8601 date or date-time ("2009-06-20", "2009-06-20T12:00:00Z",
// "2009-06-20 12:00:00+04:30", fractional seconds truncated).
std::optional<Timestamp> parse_iso8601(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

// Floor to the UTC day index (days since epoch).
std::int64_t day_index(Timestamp t);

// 64-bit FNV-1a, used for content hashes and config fingerprints.
class Fnv1a {
 public:
  Fnv1a& update(std::string_view bytes);
  Fnv1a& update(const void* data, std::size_t size);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash_file(const std::string& path);

// Stable seed derivation for per-item random streams.
std::uint64_t mix_seed(std::uint64_t seed, std::string_view salt);

// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

// Runs body(i) for i in [0, n) over contiguous static chunks. Work assignment
// depends only on n and the thread limit, so per-chunk reductions are
// reproducible.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Same, but hands each worker its chunk index and [begin, end) range.
void parallel_chunks(std::size_t n,
                     const std::function<void(unsigned chunk, std::size_t begin, std::size_t end)>& body,
                     unsigned* chunks_used = nullptr);

// stderr logging, silenced by set_log_quiet(true) (tests).
void log_info(const std::string& message);
void log_warn(const std::string& message);
void set_log_quiet(bool quiet);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace vmeme
