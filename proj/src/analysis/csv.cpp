#include "pacesim/analysis/csv.h"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pacesim {
namespace {

void appendRounded(std::ostringstream& out, const std::optional<double>& value) {
  if (value) {
    out << std::llround(*value);
  }
}

std::string fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

} // namespace

std::string ipgCsv(std::span<const SimTime> gaps) {
  std::ostringstream out;
  out << "gap_ns\n";
  for (const SimTime gap : gaps) {
    out << gap.count() << '\n';
  }
  return out.str();
}

std::string trainsCsv(const TrainStats& stats) {
  std::ostringstream out;
  out << "length,train_count,packet_count\n";
  for (const auto& [length, trains] : stats.histogram) {
    out << length << ',' << trains << ',' << length * trains << '\n';
  }
  return out.str();
}

std::string metricsCsv(std::span<const RunMetrics> runs) {
  std::ostringstream out;
  out << "run_id,goodput_bps,drops,precision_ns\n";
  for (const auto& run : runs) {
    out << run.runId << ',';
    appendRounded(out, run.goodputBps);
    out << ',' << run.droppedPackets << ',';
    appendRounded(out, run.precisionNs);
    out << '\n';
  }
  return out.str();
}

std::string cwndCsv(std::span<const CwndSample> samples) {
  std::ostringstream out;
  out << "time_ns,cwnd_bytes,pacing_rate_Bps,phase\n";
  for (const auto& s : samples) {
    out << s.time.count() << ',' << s.cwnd << ',' << std::llround(s.pacingRate) << ','
        << toString(s.phase) << '\n';
  }
  return out.str();
}

std::string summaryCsv(std::span<const NamedSummary> rows) {
  std::ostringstream out;
  out << "metric,mean,std,n,formatted\n";
  for (const auto& row : rows) {
    out << row.metric << ',' << fixed(row.summary.mean) << ',' << fixed(row.summary.stddev)
        << ',' << row.summary.count << ',' << row.summary.format() << '\n';
  }
  return out.str();
}

} // namespace pacesim
