#pragma once

#include <span>
#include <string>

#include "pacesim/analysis/metrics.h"

namespace pacesim {

// CSV renderings of run artifacts. Each has exactly one header row; times are
// integer nanoseconds and sizes integer bytes. Absent values are empty fields.

// gap_ns
std::string ipgCsv(std::span<const SimTime> gaps);

// length,train_count,packet_count in ascending length order.
std::string trainsCsv(const TrainStats& stats);

// run_id,goodput_bps,drops,precision_ns
std::string metricsCsv(std::span<const RunMetrics> runs);

// time_ns,cwnd_bytes,pacing_rate_Bps,phase
std::string cwndCsv(std::span<const CwndSample> samples);

struct NamedSummary {
  std::string metric;
  MetricSummary summary;
};

// metric,mean,std,n,formatted
std::string summaryCsv(std::span<const NamedSummary> rows);

} // namespace pacesim
