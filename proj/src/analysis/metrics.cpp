#include "pacesim/analysis/metrics.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pacesim {

std::uint64_t TrainStats::packetCount() const {
  std::uint64_t total = 0;
  for (auto len : lengths) {
    total += len;
  }
  return total;
}

double TrainStats::packetFraction(std::uint32_t minLength, std::uint32_t maxLength) const {
  const auto total = packetCount();
  if (total == 0) {
    return 0.0;
  }
  std::uint64_t inRange = 0;
  for (const auto& [length, count] : histogram) {
    if (length >= minLength && length <= maxLength) {
      inRange += static_cast<std::uint64_t>(length) * count;
    }
  }
  return static_cast<double>(inRange) / static_cast<double>(total);
}

TrainStats extractTrains(std::span<const PacketLogEntry> log, const TrainOptions& options) {
  TrainStats stats;
  stats.threshold = options.threshold;
  std::optional<SimTime> previous;
  std::uint32_t current = 0;
  for (const auto& entry : log) {
    if (entry.dropped) {
      continue;
    }
    if (previous) {
      if (entry.departureTime < *previous) {
        throw std::invalid_argument("packet log is not sorted by departure time");
      }
      const SimTime gap = entry.departureTime - *previous;
      const bool joins = options.inclusive ? gap <= options.threshold : gap < options.threshold;
      if (!joins) {
        stats.lengths.push_back(current);
        current = 0;
      }
    }
    ++current;
    previous = entry.departureTime;
  }
  if (current > 0) {
    stats.lengths.push_back(current);
  }
  for (auto len : stats.lengths) {
    ++stats.histogram[len];
  }
  return stats;
}

std::vector<CdfPoint> packetsPerTrainCdf(const TrainStats& stats) {
  std::vector<CdfPoint> cdf;
  const auto total = stats.packetCount();
  if (total == 0) {
    return cdf;
  }
  std::uint64_t running = 0;
  for (const auto& [length, count] : stats.histogram) {
    running += static_cast<std::uint64_t>(length) * count;
    cdf.push_back(CdfPoint{
        length, static_cast<double>(running) / static_cast<double>(total)});
  }
  cdf.back().cumulativeFraction = 1.0;
  return cdf;
}

std::vector<SimTime> interPacketGaps(std::span<const PacketLogEntry> log) {
  std::vector<SimTime> gaps;
  std::optional<SimTime> previous;
  for (const auto& entry : log) {
    if (entry.dropped) {
      continue;
    }
    if (previous) {
      gaps.push_back(entry.departureTime - *previous);
    }
    previous = entry.departureTime;
  }
  return gaps;
}

std::optional<double> precision(std::span<const PacketLogEntry> log) {
  // Two passes over integer differences; the mean is subtracted before
  // squaring so a large constant clock offset does not cost precision.
  std::int64_t n = 0;
  long double sum = 0;
  for (const auto& e : log) {
    if (!e.dropped && e.intendedTxTime) {
      sum += static_cast<long double>((e.departureTime - *e.intendedTxTime).count());
      ++n;
    }
  }
  if (n < 2) {
    return std::nullopt;
  }
  const long double mean = sum / n;
  long double squares = 0;
  for (const auto& e : log) {
    if (!e.dropped && e.intendedTxTime) {
      const long double d =
          static_cast<long double>((e.departureTime - *e.intendedTxTime).count()) - mean;
      squares += d * d;
    }
  }
  return static_cast<double>(std::sqrt(squares / n));
}

std::string MetricSummary::format() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, stddev);
  return buf;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary summary;
  summary.count = values.size();
  if (values.empty()) {
    return summary;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  summary.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double squares = 0.0;
    for (double v : values) {
      squares += (v - summary.mean) * (v - summary.mean);
    }
    summary.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
  }
  return summary;
}

} // namespace pacesim
