#include "eqtri/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace eqtri {

namespace {

void preamble(std::ostream& os, const CsvProvenance& prov, const char* header) {
  os << "# config_hash=" << prov.config_hash << " seed=" << prov.seed << "\n" << header << "\n";
}

std::vector<const SummaryStats*> sorted_view(const std::vector<SummaryStats>& summaries) {
  std::vector<const SummaryStats*> v;
  for (const auto& s : summaries) v.push_back(&s);
  std::stable_sort(v.begin(), v.end(), [](const SummaryStats* a, const SummaryStats* b) {
    if (a->snr_db != b->snr_db) return a->snr_db < b->snr_db;
    return to_string(a->solver) < to_string(b->solver);
  });
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_rmse_csv(std::ostream& os, const std::vector<SummaryStats>& summaries, const CsvProvenance& prov) {
  preamble(os, prov, "snr_db,solver,rmse_m,p90_m,n_trials,n_converged,n_ranging_failed");
  for (const SummaryStats* s : sorted_view(summaries)) {
    os << format_number(s->snr_db) << ',' << to_string(s->solver) << ',' << format_number(s->rmse) << ','
       << format_number(s->percentile90) << ',' << s->n_trials << ',' << s->n_converged << ','
       << s->n_ranging_failed << "\n";
  }
}

void write_cumulative_csv(std::ostream& os, double snr_db, const std::vector<SummaryStats>& summaries,
                          const CsvProvenance& prov) {
  preamble(os, prov, "solver,rank,error_m,cdf");
  for (const SummaryStats* s : sorted_view(summaries)) {
    if (s->snr_db != snr_db) continue;
    const auto n = s->sorted_errors.size();
    for (std::size_t k = 0; k < n; ++k) {
      os << to_string(s->solver) << ',' << k + 1 << ',' << format_number(s->sorted_errors[k]) << ','
         << format_number(static_cast<double>(k + 1) / static_cast<double>(n)) << "\n";
    }
  }
}

void write_runtime_csv(std::ostream& os, const SweepResult& sweep, const CsvProvenance& prov) {
  preamble(os, prov, "snr_db,solver,mean_time_s,mean_iterations,n_trials");
  std::vector<std::pair<const SummaryStats*, double>> rows;
  std::size_t idx = 0;
  for (const auto& per_snr : sweep.records) {
    for (const auto& cell : per_snr) {
      double iters = 0.0;
      int n = 0;
      for (const TrialRecord& r : cell) {
        if (r.ranging_failed) continue;
        iters += r.iterations;
        ++n;
      }
      rows.emplace_back(&sweep.summaries[idx++], n > 0 ? iters / n : 0.0);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first->snr_db != b.first->snr_db) return a.first->snr_db < b.first->snr_db;
    return to_string(a.first->solver) < to_string(b.first->solver);
  });
  for (const auto& [s, iters] : rows) {
    os << format_number(s->snr_db) << ',' << to_string(s->solver) << ',' << format_number(s->mean_time) << ','
       << format_number(iters) << ',' << s->n_trials << "\n";
  }
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundPoint>& bounds, const CsvProvenance& prov) {
  preamble(os, prov, "snr_db,sqrt_trace_crb_m,sqrt_trace_ccrb_m");
  std::vector<BoundPoint> sorted = bounds;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const BoundPoint& a, const BoundPoint& b) { return a.snr_db < b.snr_db; });
  for (const BoundPoint& b : sorted) {
    os << format_number(b.snr_db) << ',' << format_number(b.sqrt_trace_crb) << ','
       << format_number(b.sqrt_trace_ccrb) << "\n";
  }
}

std::string cumulative_file_name(double snr_db) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "cumulative_error_%g.csv", snr_db);
  return buf;
}

std::vector<std::filesystem::path> write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& sweep,
                                                       const std::vector<BoundPoint>& bounds,
                                                       const CsvProvenance& prov) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = dir / name;
    write_file(path, content);
    written.push_back(path);
  };

  std::ostringstream rmse;
  write_rmse_csv(rmse, sweep.summaries, prov);
  emit("rmse_vs_snr.csv", rmse.str());

  std::set<double> snrs;
  for (const auto& s : sweep.summaries) snrs.insert(s.snr_db);
  for (const double snr : snrs) {
    std::ostringstream cum;
    write_cumulative_csv(cum, snr, sweep.summaries, prov);
    emit(cumulative_file_name(snr), cum.str());
  }

  std::ostringstream runtime;
  write_runtime_csv(runtime, sweep, prov);
  emit("runtime.csv", runtime.str());

  std::ostringstream bnd;
  write_bounds_csv(bnd, bounds, prov);
  emit("bounds.csv", bnd.str());
  return written;
}

}  // namespace eqtri
