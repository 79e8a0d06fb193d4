#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehm/config.hpp"
#include "ehm/estimate.hpp"
#include "ehm/trajectory.hpp"

namespace ehm {

// A malformed input line; message carries "path:line: what".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& path, long line, const std::string& what);
  const std::string& path() const { return path_; }
  long line() const { return line_; }

 private:
  std::string path_;
  long line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two-file long format.
//   persons.csv: person_id,entry_age,entry_state,exit_age
//   events.csv:  person_id,event_age,to_state
// Death is an event row with to_state=d; no death row means censored at
// exit_age. Numeric fields carry 17 significant digits.
std::vector<ObservedRecord> read_cohort(const std::filesystem::path& persons_file,
                                        const std::filesystem::path& events_file);
void write_cohort(std::span<const ObservedRecord> records,
                  const std::filesystem::path& persons_file,
                  const std::filesystem::path& events_file);

// Flat key = value configuration text; '#' starts a comment.
RunConfig read_config(const std::filesystem::path& file);
void write_config(const RunConfig& config, const std::filesystem::path& file);
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");
std::string format_config(const RunConfig& config);

// Fit output schema:
//   transition,interval_lo,interval_hi,events,exposure,rate,se,ci_lo,ci_hi
// NA cells print NA in the rate/se/ci columns; the CI level is recorded
// in a leading comment line.
void write_fit(const FitResult& fit, double level, const std::filesystem::path& file);
FitResult read_fit(const std::filesystem::path& file);

std::string format_number(double x);  // 17 significant digits

}  // namespace ehm
