#include "ehm/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ehm/inference.hpp"

namespace ehm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

double parse_double(const std::string& s, const std::string& path, long line,
                    const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ValidationError(path, line, "invalid number in " + field + ": '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& path, long line,
                const std::string& field) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ValidationError(path, line, "invalid integer in " + field + ": '" + s + "'");
  }
}

std::ifstream open_input(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  return out;
}

constexpr double kDefaultWindow = 9.0;  // exit_age fallback when blank

}  // namespace

ValidationError::ValidationError(const std::string& path, long line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
      path_(path),
      line_(line) {}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<ObservedRecord> read_cohort(const std::filesystem::path& persons_file,
                                        const std::filesystem::path& events_file) {
  const std::string ppath = persons_file.string();
  const std::string epath = events_file.string();

  std::vector<ObservedRecord> records;
  std::map<std::string, std::size_t> index;

  {
    std::ifstream in = open_input(persons_file);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1) {
        if (trim(line) != "person_id,entry_age,entry_state,exit_age") {
          throw ValidationError(ppath, 1, "unexpected header: '" + trim(line) + "'");
        }
        continue;
      }
      if (trim(line).empty()) continue;
      const auto fields = split(line, ',');
      if (fields.size() != 4) {
        throw ValidationError(ppath, lineno, "expected 4 fields, got " +
                                                 std::to_string(fields.size()));
      }
      ObservedRecord rec;
      rec.person_id = fields[0];
      if (rec.person_id.empty()) throw ValidationError(ppath, lineno, "empty person_id");
      if (index.contains(rec.person_id)) {
        throw ValidationError(ppath, lineno, "duplicate person_id '" + rec.person_id + "'");
      }
      rec.entry_age = parse_double(fields[1], ppath, lineno, "entry_age");
      if (rec.entry_age < 0.0) throw ValidationError(ppath, lineno, "entry_age < 0");
      const auto state = parse_state(fields[2]);
      if (!state) {
        throw ValidationError(ppath, lineno, "unknown entry_state '" + fields[2] + "'");
      }
      if (*state == State::Dead) {
        throw ValidationError(ppath, lineno, "entry_state may not be d");
      }
      rec.entry_state = *state;
      rec.exit_age = fields[3].empty() ? rec.entry_age + kDefaultWindow
                                       : parse_double(fields[3], ppath, lineno, "exit_age");
      if (!(rec.exit_age > rec.entry_age)) {
        throw ValidationError(ppath, lineno, "exit_age must exceed entry_age");
      }
      index.emplace(rec.person_id, records.size());
      records.push_back(std::move(rec));
    }
  }

  {
    std::ifstream in = open_input(events_file);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (lineno == 1) {
        if (trim(line) != "person_id,event_age,to_state") {
          throw ValidationError(epath, 1, "unexpected header: '" + trim(line) + "'");
        }
        continue;
      }
      if (trim(line).empty()) continue;
      const auto fields = split(line, ',');
      if (fields.size() != 3) {
        throw ValidationError(epath, lineno, "expected 3 fields, got " +
                                                 std::to_string(fields.size()));
      }
      const auto it = index.find(fields[0]);
      if (it == index.end()) {
        throw ValidationError(epath, lineno, "unknown person_id '" + fields[0] + "'");
      }
      ObservedRecord& rec = records[it->second];
      const double age = parse_double(fields[1], epath, lineno, "event_age");
      const auto state = parse_state(fields[2]);
      if (!state) throw ValidationError(epath, lineno, "unknown to_state '" + fields[2] + "'");
      if (!(age > rec.entry_age) || age > rec.exit_age) {
        throw ValidationError(epath, lineno, "event_age outside (entry_age, exit_age]");
      }
      const State from = rec.events.empty() ? rec.entry_state : rec.events.back().to;
      if (!rec.events.empty() && !(age > rec.events.back().age)) {
        throw ValidationError(epath, lineno,
                              "event ages must be strictly increasing per person");
      }
      if (!classify_transition(from, *state)) {
        throw ValidationError(epath, lineno,
                              "inadmissible transition " + std::string(state_code(from)) +
                                  " -> " + std::string(state_code(*state)));
      }
      if (*state == State::Dead && age != rec.exit_age) {
        throw ValidationError(epath, lineno, "death event must coincide with exit_age");
      }
      rec.events.push_back({age, *state});
    }
  }
  return records;
}

void write_cohort(std::span<const ObservedRecord> records,
                  const std::filesystem::path& persons_file,
                  const std::filesystem::path& events_file) {
  std::vector<const ObservedRecord*> sorted;
  sorted.reserve(records.size());
  for (const ObservedRecord& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->person_id < b->person_id; });

  std::ofstream persons = open_output(persons_file);
  persons << "person_id,entry_age,entry_state,exit_age\n";
  std::ofstream events = open_output(events_file);
  events << "person_id,event_age,to_state\n";
  for (const ObservedRecord* rec : sorted) {
    persons << rec->person_id << ',' << format_number(rec->entry_age) << ','
            << state_code(rec->entry_state) << ',' << format_number(rec->exit_age) << '\n';
    for (const ObservedEvent& e : rec->events) {
      events << rec->person_id << ',' << format_number(e.age) << ',' << state_code(e.to)
             << '\n';
    }
  }
  if (!persons || !events) {
    throw IoError("failed writing cohort files " + persons_file.string() + ", " +
                  events_file.string());
  }
}

namespace {

std::vector<double> parse_number_list(const std::string& value, const std::string& origin,
                                      long line, const std::string& key) {
  std::vector<double> out;
  std::istringstream iss(value);
  std::string tok;
  while (iss >> tok) out.push_back(parse_double(tok, origin, line, key));
  if (out.empty()) throw ValidationError(origin, line, "empty value for " + key);
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  double tau = 63.0;
  double window = 9.0;
  EntryAgeDist entry = EntryAgeDist::uniform(0.0, 54.0);
  long n_all = 0;
  std::uint64_t seed = 0;
  int replications = 1;
  std::optional<std::vector<double>> partition;
  std::array<std::vector<double>, kNumTransitions> rate_values;

  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(origin, lineno, "expected 'key = value'");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key == "tau") {
      tau = parse_double(value, origin, lineno, key);
    } else if (key == "window") {
      window = parse_double(value, origin, lineno, key);
    } else if (key == "n_all") {
      n_all = parse_long(value, origin, lineno, key);
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(parse_long(value, origin, lineno, key));
    } else if (key == "replications") {
      replications = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "partition") {
      partition = parse_number_list(value, origin, lineno, key);
    } else if (key == "entry_age") {
      std::istringstream vss(value);
      std::string kind;
      vss >> kind;
      std::string rest;
      std::getline(vss, rest);
      try {
        if (kind == "uniform") {
          const auto p = parse_number_list(rest, origin, lineno, key);
          if (p.size() != 2) throw std::invalid_argument("uniform needs lo hi");
          entry = EntryAgeDist::uniform(p[0], p[1]);
        } else if (kind == "degenerate") {
          const auto p = parse_number_list(rest, origin, lineno, key);
          if (p.size() != 1) throw std::invalid_argument("degenerate needs u0");
          entry = EntryAgeDist::degenerate(p[0]);
        } else if (kind == "empirical") {
          entry = EntryAgeDist::empirical(parse_number_list(rest, origin, lineno, key));
        } else {
          throw std::invalid_argument("unknown kind '" + kind + "'");
        }
      } catch (const ValidationError&) {
        throw;
      } catch (const std::exception& e) {
        throw ValidationError(origin, lineno, std::string("entry_age: ") + e.what());
      }
    } else if (key.starts_with("rate.")) {
      const auto kind = parse_transition(key.substr(5));
      if (!kind) throw ValidationError(origin, lineno, "unknown transition in '" + key + "'");
      rate_values[index_of(*kind)] = parse_number_list(value, origin, lineno, key);
    } else {
      throw ValidationError(origin, lineno, "unknown key '" + key + "'");
    }
  }

  std::vector<double> breaks = partition.value_or(std::vector<double>{0.0, tau});
  std::size_t b = breaks.size() - 1;
  std::vector<RateSet> cells(b);
  for (TransitionKind k : kAllTransitions) {
    const auto& vals = rate_values[index_of(k)];
    if (vals.empty()) continue;  // rate 0 everywhere
    if (vals.size() != 1 && vals.size() != b) {
      throw ValidationError(origin, 0,
                            "rate." + std::string(transition_code(k)) + ": expected 1 or " +
                                std::to_string(b) + " values, got " +
                                std::to_string(vals.size()));
    }
    for (std::size_t l = 0; l < b; ++l) {
      cells[l].set(k, vals.size() == 1 ? vals[0] : vals[l]);
    }
  }

  RunConfig cfg;
  try {
    cfg.rates = PiecewiseRateSet(Partition(std::move(breaks)), std::move(cells));
  } catch (const std::exception& e) {
    throw ValidationError(origin, 0, std::string("partition: ") + e.what());
  }
  cfg.scheme.tau = tau;
  cfg.scheme.window = window;
  cfg.scheme.entry_age = entry;
  cfg.n_all = n_all;
  cfg.seed = seed;
  cfg.replications = replications;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ValidationError(origin, 0, e.what());
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path& file) {
  std::ifstream in = open_input(file);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.string());
}

std::string format_config(const RunConfig& config) {
  std::ostringstream out;
  out << "tau = " << format_number(config.scheme.tau) << '\n';
  out << "window = " << format_number(config.scheme.window) << '\n';
  out << "entry_age =";
  switch (config.scheme.entry_age.kind()) {
    case EntryAgeDist::Kind::Uniform: out << " uniform"; break;
    case EntryAgeDist::Kind::Degenerate: out << " degenerate"; break;
    case EntryAgeDist::Kind::Empirical: out << " empirical"; break;
  }
  for (double p : config.scheme.entry_age.params()) out << ' ' << format_number(p);
  out << '\n';
  out << "n_all = " << config.n_all << '\n';
  out << "seed = " << config.seed << '\n';
  out << "replications = " << config.replications << '\n';
  const Partition& part = config.rates.partition();
  if (part.intervals() > 1) {
    out << "partition =";
    for (double b : part.breakpoints()) out << ' ' << format_number(b);
    out << '\n';
  }
  for (TransitionKind k : kAllTransitions) {
    out << "rate." << transition_code(k) << " =";
    for (std::size_t l = 0; l < part.intervals(); ++l) {
      out << ' ' << format_number(config.rates.interval_rates(l)[k]);
    }
    out << '\n';
  }
  return out.str();
}

void write_config(const RunConfig& config, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << format_config(config);
  if (!out) throw IoError("failed writing " + file.string());
}

void write_fit(const FitResult& fit, double level, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "# model=" << (fit.model == FitResult::Model::Homogeneous ? "homogeneous"
                        : fit.model == FitResult::Model::Piecewise ? "piecewise"
                                                                   : "mortality")
      << " level=" << format_number(level) << '\n';
  out << "transition,interval_lo,interval_hi,events,exposure,rate,se,ci_lo,ci_hi\n";
  for (const ParamFit& cell : fit.params) {
    out << (fit.model == FitResult::Model::Mortality ? "alive-d"
                                                     : std::string(transition_code(cell.kind)))
        << ',' << format_number(cell.interval_lo) << ',' << format_number(cell.interval_hi)
        << ',' << cell.events << ',' << format_number(cell.exposure) << ',';
    if (cell.status == CellStatus::NoExposure) {
      out << "NA,NA,NA,NA\n";
    } else {
      const auto [lo, hi] = wald_ci(cell.estimate, cell.se, level);
      out << format_number(cell.estimate) << ',' << format_number(cell.se) << ','
          << format_number(lo) << ',' << format_number(hi) << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + file.string());
}

FitResult read_fit(const std::filesystem::path& file) {
  const std::string path = file.string();
  std::ifstream in = open_input(file);
  FitResult fit;
  std::string line;
  long lineno = 0;
  bool header_seen = false;
  bool mortality = false;
  std::vector<std::pair<double, double>> intervals;  // in file order, deduped
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    if (stripped.starts_with("#")) {
      if (stripped.find("model=mortality") != std::string::npos) mortality = true;
      if (stripped.find("model=piecewise") != std::string::npos) {
        fit.model = FitResult::Model::Piecewise;
      }
      continue;
    }
    if (!header_seen) {
      if (stripped != "transition,interval_lo,interval_hi,events,exposure,rate,se,ci_lo,ci_hi") {
        throw ValidationError(path, lineno, "unexpected fit header");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(stripped, ',');
    if (fields.size() != 9) {
      throw ValidationError(path, lineno, "expected 9 fields");
    }
    ParamFit cell;
    if (!mortality) {
      const auto kind = parse_transition(fields[0]);
      if (!kind) throw ValidationError(path, lineno, "unknown transition '" + fields[0] + "'");
      cell.kind = *kind;
    }
    cell.interval_lo = parse_double(fields[1], path, lineno, "interval_lo");
    cell.interval_hi = parse_double(fields[2], path, lineno, "interval_hi");
    cell.events = parse_long(fields[3], path, lineno, "events");
    cell.exposure = parse_double(fields[4], path, lineno, "exposure");
    if (fields[5] == "NA") {
      cell.status = CellStatus::NoExposure;
    } else {
      cell.estimate = parse_double(fields[5], path, lineno, "rate");
      cell.se = parse_double(fields[6], path, lineno, "se");
      cell.status = cell.events == 0 ? CellStatus::ZeroEvents : CellStatus::Ok;
    }
    if (intervals.empty() || intervals.back() != std::make_pair(cell.interval_lo,
                                                                cell.interval_hi)) {
      intervals.emplace_back(cell.interval_lo, cell.interval_hi);
    }
    fit.params.push_back(cell);
  }
  if (!header_seen) throw ValidationError(path, lineno, "missing header");
  if (mortality) {
    fit.model = FitResult::Model::Mortality;
  } else if (fit.model == FitResult::Model::Piecewise || intervals.size() > 1) {
    fit.model = FitResult::Model::Piecewise;
    std::vector<double> breaks;
    breaks.push_back(intervals.front().first);
    for (const auto& [lo, hi] : intervals) {
      if (lo != breaks.back()) {
        throw ValidationError(path, 0, "fit intervals are not contiguous");
      }
      breaks.push_back(hi);
    }
    fit.partition = Partition(std::move(breaks));
  }
  return fit;
}

}  // namespace ehm
