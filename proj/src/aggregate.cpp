#include "ehm/aggregate.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "ehm/parallel.hpp"

namespace ehm {

namespace {

constexpr long kBlockSize = 4096;  // fixed so reductions do not depend on thread count

struct PartialHomogeneous {
  std::array<long, kNumTransitions> counts{};
  std::array<KahanSum, kNumTransient> exposures{};
};

void accumulate_homogeneous(const ObservedRecord& rec, PartialHomogeneous& acc) {
  State from = rec.entry_state;
  for (const ObservedEvent& e : rec.events) {
    const auto kind = classify_transition(from, e.to);
    if (!kind) throw std::invalid_argument("aggregate: inadmissible transition in record");
    ++acc.counts[index_of(*kind)];
    from = e.to;
  }
  for (const Episode& ep : rec.episodes()) {
    acc.exposures[index_of(ep.state)].add(ep.stop - ep.start);
  }
}

struct PartialPiecewise {
  std::vector<std::array<long, kNumTransitions>> counts;
  std::vector<std::array<KahanSum, kNumTransient>> exposures;

  explicit PartialPiecewise(std::size_t b) : counts(b), exposures(b) {
    for (auto& c : counts) c.fill(0);
  }
};

void accumulate_piecewise(const ObservedRecord& rec, const Partition& part,
                          PartialPiecewise& acc) {
  if (rec.exit_age > part.horizon()) {
    throw std::invalid_argument("aggregate: record extends beyond partition horizon");
  }
  State from = rec.entry_state;
  for (const ObservedEvent& e : rec.events) {
    const auto kind = classify_transition(from, e.to);
    if (!kind) throw std::invalid_argument("aggregate: inadmissible transition in record");
    ++acc.counts[part.interval_of(e.age)][index_of(*kind)];
    from = e.to;
  }
  for (const Episode& ep : rec.episodes()) {
    for (std::size_t l = 0; l < part.intervals(); ++l) {
      const double lo = std::max(ep.start, part.lower(l));
      const double hi = std::min(ep.stop, part.upper(l));
      if (hi > lo) acc.exposures[l][index_of(ep.state)].add(hi - lo);
    }
  }
}

long block_count(long n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

double Aggregates::total_exposure() const {
  KahanSum s;
  for (double e : exposures) s.add(e);
  return s.value();
}

Aggregates IntervalAggregates::totals() const {
  Aggregates total;
  std::array<KahanSum, kNumTransient> exp;
  for (const Aggregates& cell : cells) {
    for (int k = 0; k < kNumTransitions; ++k) total.counts[k] += cell.counts[k];
    for (int h = 0; h < kNumTransient; ++h) exp[h].add(cell.exposures[h]);
  }
  for (int h = 0; h < kNumTransient; ++h) total.exposures[h] = exp[h].value();
  return total;
}

Aggregates aggregate_homogeneous_serial(std::span<const ObservedRecord> records) {
  PartialHomogeneous acc;
  for (const ObservedRecord& rec : records) accumulate_homogeneous(rec, acc);
  Aggregates out;
  out.counts = acc.counts;
  for (int h = 0; h < kNumTransient; ++h) out.exposures[h] = acc.exposures[h].value();
  return out;
}

Aggregates aggregate_homogeneous(std::span<const ObservedRecord> records) {
  const long n = static_cast<long>(records.size());
  const long blocks = block_count(n);
  std::vector<PartialHomogeneous> partials(static_cast<std::size_t>(blocks));
  std::exception_ptr error;
  std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (long b = 0; b < blocks; ++b) {
    const long lo = b * kBlockSize;
    const long hi = std::min(n, lo + kBlockSize);
    try {
      for (long i = lo; i < hi; ++i) {
        accumulate_homogeneous(records[static_cast<std::size_t>(i)],
                               partials[static_cast<std::size_t>(b)]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  Aggregates out;
  std::array<KahanSum, kNumTransient> exp;
  for (const PartialHomogeneous& p : partials) {
    for (int k = 0; k < kNumTransitions; ++k) out.counts[k] += p.counts[k];
    for (int h = 0; h < kNumTransient; ++h) exp[h].add(p.exposures[h].value());
  }
  for (int h = 0; h < kNumTransient; ++h) out.exposures[h] = exp[h].value();
  return out;
}

IntervalAggregates aggregate_piecewise_serial(std::span<const ObservedRecord> records,
                                              const Partition& partition) {
  PartialPiecewise acc(partition.intervals());
  for (const ObservedRecord& rec : records) accumulate_piecewise(rec, partition, acc);
  IntervalAggregates out(partition);
  for (std::size_t l = 0; l < partition.intervals(); ++l) {
    out.cells[l].counts = acc.counts[l];
    for (int h = 0; h < kNumTransient; ++h) {
      out.cells[l].exposures[h] = acc.exposures[l][h].value();
    }
  }
  return out;
}

IntervalAggregates aggregate_piecewise(std::span<const ObservedRecord> records,
                                       const Partition& partition) {
  const long n = static_cast<long>(records.size());
  const long blocks = block_count(n);
  const std::size_t b_intervals = partition.intervals();
  std::vector<PartialPiecewise> partials(static_cast<std::size_t>(blocks),
                                         PartialPiecewise(b_intervals));
  std::exception_ptr error;
  std::mutex error_mutex;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (long b = 0; b < blocks; ++b) {
    const long lo = b * kBlockSize;
    const long hi = std::min(n, lo + kBlockSize);
    try {
      for (long i = lo; i < hi; ++i) {
        accumulate_piecewise(records[static_cast<std::size_t>(i)], partition,
                             partials[static_cast<std::size_t>(b)]);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  IntervalAggregates out(partition);
  std::vector<std::array<KahanSum, kNumTransient>> exp(b_intervals);
  for (const PartialPiecewise& p : partials) {
    for (std::size_t l = 0; l < b_intervals; ++l) {
      for (int k = 0; k < kNumTransitions; ++k) out.cells[l].counts[k] += p.counts[l][k];
      for (int h = 0; h < kNumTransient; ++h) exp[l][h].add(p.exposures[l][h].value());
    }
  }
  for (std::size_t l = 0; l < b_intervals; ++l) {
    for (int h = 0; h < kNumTransient; ++h) out.cells[l].exposures[h] = exp[l][h].value();
  }
  return out;
}

}  // namespace ehm
