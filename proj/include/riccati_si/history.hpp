#pragma once

#include <chrono>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace riccati_si {

enum class SolveStatus { running, converged, max_iter, breakdown };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::running: return "running";
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

struct IterationRecord {
  Index iteration = 0;
  Index dimension = 0;
  Index rank = 0;
  double rel_residual = 0.0;
  double seconds = 0.0;
};

/// Append-only per-iteration log of a solve.
class ConvergenceHistory {
 public:
  static constexpr const char* kCsvHeader = "iter,dim,rank,rel_residual,seconds";

  void append(const IterationRecord& record) {
    if (!records_.empty() && record.dimension < records_.back().dimension)
      throw Error(ErrorKind::invalid_argument, "space dimension must be nondecreasing");
    records_.push_back(record);
  }

  const std::vector<IterationRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }
  const IterationRecord& back() const { return records_.back(); }

  SolveStatus status() const { return status_; }
  const std::string& message() const { return message_; }
  void finish(SolveStatus status, std::string message = {}) {
    status_ = status;
    message_ = std::move(message);
  }

  /// Residual of the first record at or above `dimension`, if any.
  std::optional<double> residual_at_dimension(Index dimension) const {
    for (const auto& r : records_)
      if (r.dimension >= dimension) return r.rel_residual;
    return std::nullopt;
  }

  /// Smallest space dimension whose residual is ≤ tol.
  std::optional<Index> dimension_reaching(double tol) const {
    for (const auto& r : records_)
      if (r.rel_residual <= tol) return r.dimension;
    return std::nullopt;
  }

  void write_csv(std::ostream& out) const {
    out << kCsvHeader << '\n';
    for (const auto& r : records_) {
      out << r.iteration << ',' << r.dimension << ',' << r.rank << ',';
      out << std::setprecision(17) << r.rel_residual << ',';
      out << std::setprecision(6) << r.seconds << '\n';
    }
  }

  std::string csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
  }

 private:
  std::vector<IterationRecord> records_;
  SolveStatus status_ = SolveStatus::running;
  std::string message_;
};

/// Wall-clock seconds since construction; reports 0 when disabled so that
/// outputs can be byte-for-byte reproducible.
class Stopwatch {
 public:
  explicit Stopwatch(bool enabled = true)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

  double seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace riccati_si
