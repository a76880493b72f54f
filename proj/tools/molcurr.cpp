// molcurr command-line front end.
#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "molcurr/corpus_gen.hpp"
#include "molcurr/loss_check.hpp"
#include "molcurr/pipeline.hpp"
#include "molcurr/smiles.hpp"

namespace {

using namespace molcurr;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input, output, format = "auto", smiles_column = "smiles";
  std::string prevalence, patterns;
  unsigned workers = 1;
  std::uint64_t seed = 42;
  std::size_t chunk_size = 256;

  TierConfig tiers;
  std::string regime = "staged10";
  int epochs = 10;
  std::string hard_start = "0.1";

  std::string tier_counts;
  std::size_t generate = 10000;
  int repeats = 3;
  std::size_t count = 10000;

  int seeds = 100;
  double eps = 1e-5;
  double floor = 1e-3;
  double tolerance = 1e-5;
  double tau = 0.07;
  double alpha = 10.0, beta = 1.0;
  bool canonical_nt_xent = false;
  bool unsigned_bias = false;
};

PipelineConfig to_config(const Options &o) {
  PipelineConfig c;
  c.input = o.input;
  c.output = o.output;
  if (o.format == "smi") c.format = CorpusFormat::Smi;
  else if (o.format == "delimited") c.format = CorpusFormat::Delimited;
  else if (o.format == "auto") c.format = CorpusFormat::Auto;
  else throw UsageError("format must be auto, smi or delimited");
  c.smiles_column = o.smiles_column;
  if (o.workers < 1) throw UsageError("workers must be >= 1");
  c.workers = o.workers;
  c.seed = o.seed;
  c.chunk_size = o.chunk_size;
  if (!o.prevalence.empty()) c.prevalence = o.prevalence;
  if (!o.patterns.empty()) c.patterns = o.patterns;
  try {
    o.tiers.validate();
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  c.tiers = o.tiers;
  const auto regime = parse_regime(o.regime);
  if (!regime) throw UsageError("regime must be additive, staged10, mixed, standard or anti");
  c.schedule.regime = *regime;
  c.schedule.epochs = o.epochs;
  c.schedule.seed = o.seed;
  try {
    c.schedule.hard_start = Fraction::parse(o.hard_start);
    c.schedule.validate();
  } catch (const std::exception &e) {
    throw UsageError(e.what());
  }
  return c;
}

void log_run(std::string_view command, const PipelineConfig &c) {
  fmt::print(stderr, "[molcurr] {}: seed={} workers={}\n", command, c.seed, c.workers);
}

template <class Skipped>
void log_skipped(const Skipped &skipped) {
  if (skipped.empty()) return;
  fmt::print(stderr, "[molcurr] skipped {} unparseable line(s)\n", skipped.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(skipped.size(), 5); ++i)
    fmt::print(stderr, "[molcurr]   line {}: {}\n", skipped[i].id + 1, skipped[i].reason);
}

// TOML-style "key = value" lines; keys may use '_' or '-'.
class KeyValueConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream &in) const override {
    auto items = CLI::ConfigTOML::from_config(in);
    for (auto &item : items) std::replace(item.name.begin(), item.name.end(), '_', '-');
    return items;
  }
};

TierCounts parse_tier_counts(const std::string &text) {
  TierCounts counts{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= kNumTiers) throw UsageError("tier-counts needs exactly 5 comma-separated counts");
    std::size_t used = 0;
    try {
      counts[k] = std::stoull(item, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != item.size() || item.front() == '-')
      throw UsageError(fmt::format("bad tier count '{}'", item));
    ++k;
  }
  if (k != kNumTiers) throw UsageError("tier-counts needs exactly 5 comma-separated counts");
  return counts;
}

int run(int argc, char **argv) {
  CLI::App app{"Molecular complexity descriptors, curriculum tiers, schedules and loss checks"};
  app.set_config("--config", "", "Key-value config file (key = value); flags override it");
  app.config_formatter(std::make_shared<KeyValueConfig>());
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();
  Options o;

  app.add_option("--input,-i", o.input, "Input file (corpus, or annotated JSONL)");
  app.add_option("--output,-o", o.output, "Output file or directory ('-' = stdout)");
  app.add_option("--format", o.format, "Corpus format: auto, smi, delimited");
  app.add_option("--smiles-column", o.smiles_column, "SMILES column name for delimited input");
  app.add_option("--prevalence", o.prevalence, "Precomputed prevalence table");
  app.add_option("--patterns", o.patterns, "Custom functional-group pattern file");
  app.add_option("--workers,-j", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--chunk-size", o.chunk_size, "Molecules per work chunk")->check(CLI::PositiveNumber);

  app.add_option("--rarity-threshold", o.tiers.rarity_threshold, "T4 rarity threshold");
  app.add_option("--top-k", o.tiers.top_k, "Size of the common-group list for T1");
  app.add_option("--s-threshold", o.tiers.s_threshold, "Aromatic substitution threshold");
  app.add_option("--ct-per-ha-threshold", o.tiers.ct_per_ha_threshold, "CT per heavy atom threshold");
  app.add_option("--min-rings-t3", o.tiers.min_rings_t3, "Ring count for the dense-complexity rule");
  app.add_option("--fg-low", o.tiers.fg_low, "Max groups for T1");
  app.add_option("--fg-mid-lo", o.tiers.fg_mid_lo, "Min groups for T2");
  app.add_option("--fg-mid-hi", o.tiers.fg_mid_hi, "Max groups for T2");

  app.add_option("--regime", o.regime, "additive, staged10, mixed, standard, anti");
  app.add_option("--epochs", o.epochs, "Number of epochs");
  app.add_option("--hard-start", o.hard_start, "Mixed-regime starting fraction (exact decimal)");

  auto *prevalence = app.add_subcommand("prevalence", "Functional-group prevalence table and top groups");
  auto *annotate = app.add_subcommand("annotate", "Descriptors and tiers as JSON lines");
  auto *schedule = app.add_subcommand("schedule", "Per-epoch manifests and budget report");
  schedule->add_option("--tier-counts", o.tier_counts, "Budget only, from counts 'T0,T1,T2,T3,T4'");
  auto *stats = app.add_subcommand("stats", "Summary statistics of an annotated file");
  auto *bench = app.add_subcommand("bench", "Descriptor pipeline throughput");
  bench->add_option("--generate", o.generate, "Synthetic corpus size when no input is given");
  bench->add_option("--repeats", o.repeats, "Timing repetitions (best is reported)")->check(CLI::PositiveNumber);
  auto *loss = app.add_subcommand("loss-check", "Gradient and property checks of the loss kernels");
  loss->add_option("--seeds", o.seeds, "Random seeds per configuration")->check(CLI::PositiveNumber);
  loss->add_option("--eps", o.eps, "Finite-difference step");
  loss->add_option("--floor", o.floor, "Relative-error denominator floor");
  loss->add_option("--tolerance", o.tolerance, "Maximum relative error");
  loss->add_option("--tau", o.tau, "NT-Xent temperature");
  loss->add_option("--alpha", o.alpha, "Hybrid alignment weight");
  loss->add_option("--beta", o.beta, "Hybrid head weight");
  loss->add_flag("--canonical-nt-xent", o.canonical_nt_xent, "Include the positive in the denominator");
  loss->add_flag("--unsigned-bias", o.unsigned_bias, "Add the SigLIP bias without the label sign");
  auto *generate = app.add_subcommand("generate", "Write a synthetic drug-like SMILES corpus");
  generate->add_option("--count", o.count, "Number of molecules");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  const PipelineConfig cfg = to_config(o);

  if (prevalence->parsed()) {
    log_run("prevalence", cfg);
    const auto r = cmd_prevalence(cfg);
    log_skipped(r.skipped);
    fmt::print(stderr, "[molcurr] corpus_size={} top{}:", r.table.corpus_size, cfg.tiers.top_k);
    for (const auto &g : r.top_groups) fmt::print(stderr, " {}", g);
    fmt::print(stderr, "\n");
  } else if (annotate->parsed()) {
    log_run("annotate", cfg);
    const auto r = cmd_annotate(cfg);
    log_skipped(r.skipped);
    fmt::print(stderr, "[molcurr] annotated {} molecule(s)\n", r.records.size());
  } else if (schedule->parsed()) {
    log_run("schedule", cfg);
    const ScheduleReport r = o.tier_counts.empty() ? cmd_schedule(cfg)
                                                   : schedule_from_counts(parse_tier_counts(o.tier_counts), cfg.schedule);
    print_schedule_report(std::cout, r);
  } else if (stats->parsed()) {
    log_run("stats", cfg);
    print_stats_report(std::cout, cmd_stats(cfg));
  } else if (bench->parsed()) {
    log_run("bench", cfg);
    print_bench_report(std::cout, cmd_bench(cfg, o.generate, o.repeats));
  } else if (loss->parsed()) {
    GradCheckConfig g;
    fmt::print(stderr, "[molcurr] loss-check: seed={} workers=1 seeds={} eps={} floor={}\n", g.first_seed,
               o.seeds, o.eps, o.floor);
    g.seeds = o.seeds;
    g.eps = o.eps;
    g.floor = o.floor;
    g.tolerance = o.tolerance;
    g.nt_xent.tau = o.tau;
    g.nt_xent.canonical_denominator = o.canonical_nt_xent;
    g.hybrid.alpha = o.alpha;
    g.hybrid.beta = o.beta;
    g.hybrid.siglip.signed_bias = !o.unsigned_bias;
    bool all = true;
    for (const auto &c : run_loss_suite(g)) {
      fmt::print("{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
      all &= c.passed;
    }
    return all ? kExitOk : kExitData;
  } else if (generate->parsed()) {
    log_run("generate", cfg);
    CorpusGenOptions g;
    g.count = o.count;
    g.seed = cfg.seed;
    const auto corpus = generate_corpus(g);
    auto write = [&](std::ostream &os) {
      for (const auto &s : corpus) os << s << '\n';
    };
    if (cfg.output.empty() || cfg.output == "-") {
      write(std::cout);
    } else {
      std::ofstream out(cfg.output);
      if (!out) throw DataError("IOError: cannot write " + cfg.output.string());
      write(out);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const molcurr::ScheduleError &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  }
}
