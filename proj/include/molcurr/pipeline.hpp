#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molcurr/descriptors.hpp"
#include "molcurr/fg_library.hpp"
#include "molcurr/scheduler.hpp"
#include "molcurr/tiering.hpp"

namespace molcurr {

// Bad input data or unreadable files; the CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CorpusFormat { Auto, Smi, Delimited };

struct PipelineConfig {
  std::filesystem::path input;
  CorpusFormat format = CorpusFormat::Auto;
  std::string smiles_column = "smiles";
  unsigned workers = 1;
  std::uint64_t seed = 42;
  TierConfig tiers;
  ScheduleSpec schedule;
  std::filesystem::path output;
  std::optional<std::filesystem::path> prevalence;  // precomputed table
  std::optional<std::filesystem::path> patterns;    // custom pattern library
  std::size_t chunk_size = 256;

  const PatternLibrary &library() const;

 private:
  mutable std::optional<PatternLibrary> custom_library_;
};

struct CorpusEntry {
  std::uint64_t id = 0;  // 0-based data line number
  std::string smiles;
};

struct SkippedLine {
  std::uint64_t id = 0;
  std::string reason;
};

// .smi: first whitespace-separated token per line. Delimited: header row with
// a column named `smiles_column`; tab, comma or semicolon separated.
// Blank lines and lines starting with '#' are ignored (their IDs are unused).
std::vector<CorpusEntry> read_corpus(const std::filesystem::path &path, CorpusFormat format,
                                     const std::string &smiles_column = "smiles");
std::vector<CorpusEntry> read_corpus(std::istream &in, CorpusFormat format,
                                     const std::string &smiles_column = "smiles");

// Runs fn(begin, end) over [0, n) in chunks on up to `workers` threads.
void parallel_chunks(std::size_t n, unsigned workers, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)> &fn);

struct AnnotatedRecord {
  std::uint64_t id = 0;
  std::string smiles;
  DescriptorRecord descriptors;
  TierLabel label;
};

struct AnnotateResult {
  std::vector<AnnotatedRecord> records;  // input order
  std::vector<SkippedLine> skipped;      // input order
  std::optional<PrevalenceTable> table;  // empty when nothing parsed
};

// Phase 1 computes rarity-free records in parallel; phase 2 derives the
// prevalence table (unless supplied), then rarity and tier per record.
AnnotateResult annotate_corpus(const std::vector<CorpusEntry> &corpus, const PatternLibrary &library,
                               const std::optional<PrevalenceTable> &table, const TierConfig &tiers,
                               unsigned workers, std::size_t chunk_size = 256);

struct PrevalenceResult {
  PrevalenceTable table;
  std::vector<std::string> top_groups;
  std::vector<SkippedLine> skipped;
};

PrevalenceResult corpus_prevalence(const std::vector<CorpusEntry> &corpus,
                                   const PatternLibrary &library, unsigned workers,
                                   std::size_t chunk_size = 256);

// One JSON object per line, fields in a fixed order.
std::string format_record(const AnnotatedRecord &record);

// ---- subcommands ------------------------------------------------------------

// Writes the table to cfg.output (or `<input>.prevalence.tsv`).
PrevalenceResult cmd_prevalence(const PipelineConfig &cfg);

// Writes JSONL to cfg.output.
AnnotateResult cmd_annotate(const PipelineConfig &cfg);

struct ScheduleReport {
  ScheduleSpec spec;
  TierCounts counts{};
  std::vector<Fraction> per_epoch;
  Fraction total;
  std::uint64_t baseline = 0;
  double ratio = 0.0;
  std::vector<std::uint64_t> manifest_sizes;  // empty in counts-only mode
};

// Reads tiers from the annotated JSONL at cfg.input; throws DataError
// ("MissingTierField") when a line lacks a valid tier. Writes manifests to
// cfg.output when it is non-empty.
ScheduleReport cmd_schedule(const PipelineConfig &cfg);
// Budget arithmetic only, no manifests.
ScheduleReport schedule_from_counts(const TierCounts &counts, const ScheduleSpec &spec);
TierIndex read_tier_index(const std::filesystem::path &annotated);
void print_schedule_report(std::ostream &os, const ScheduleReport &report);

struct Summary {
  double mean = 0, median = 0, p99 = 0;
};
struct Quartiles {
  double q1 = 0, q2 = 0, q3 = 0;
};

// Linear interpolation between order statistics, position q * (n - 1).
double quantile_sorted(const std::vector<double> &sorted, double q);
Summary summarize(std::vector<double> values);

struct StatsReport {
  std::uint64_t molecules = 0;
  Summary mw, bertz_ct, n_ring;
  TierHistogram histogram{};
  std::array<std::optional<Quartiles>, kNumTiers> ct_quartiles;
};

// Throws DataError("EmptyInput") when the file holds no records.
StatsReport cmd_stats(const PipelineConfig &cfg);
void print_stats_report(std::ostream &os, const StatsReport &report);

struct BenchReport {
  std::size_t molecules = 0;
  unsigned workers = 1;
  double single_ms_per_mol = 0, single_mol_per_s = 0;
  double parallel_ms_per_mol = 0, parallel_mol_per_s = 0;
  double speedup = 0, efficiency = 0;
  unsigned hardware_threads = 0;
};

// Times the parse + descriptor + tier pipeline on cfg.input, or on a
// generated corpus of `generate` molecules when the input is empty.
BenchReport cmd_bench(const PipelineConfig &cfg, std::size_t generate = 10000, int repeats = 3);
void print_bench_report(std::ostream &os, const BenchReport &report);

}  // namespace molcurr
