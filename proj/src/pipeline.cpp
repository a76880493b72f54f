#include "molcurr/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "molcurr/corpus_gen.hpp"
#include "molcurr/mol_graph.hpp"
#include "molcurr/smiles.hpp"

namespace molcurr {

using Json = nlohmann::ordered_json;

const PatternLibrary &PipelineConfig::library() const {
  if (!patterns) return PatternLibrary::default_library();
  if (!custom_library_) {
    try {
      custom_library_ = PatternLibrary::load(patterns->string());
    } catch (const std::exception &e) {
      throw DataError(e.what());
    }
  }
  return *custom_library_;
}

// ---- corpus input -------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    out.push_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool ignorable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

CorpusFormat detect_format(const std::filesystem::path &path) {
  const auto ext = path.extension().string();
  if (ext == ".csv" || ext == ".tsv" || ext == ".txt") return CorpusFormat::Delimited;
  return CorpusFormat::Smi;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::vector<CorpusEntry> read_corpus(std::istream &in, CorpusFormat format,
                                     const std::string &smiles_column) {
  std::vector<CorpusEntry> out;
  std::string line;
  std::uint64_t id = 0;
  if (format != CorpusFormat::Delimited) {
    for (; std::getline(in, line); ++id) {
      if (ignorable(line)) continue;
      const auto t = trim(line);
      const auto end = t.find_first_of(" \t");
      out.push_back({id, std::string(t.substr(0, end))});
    }
    return out;
  }

  std::string header;
  while (std::getline(in, header) && ignorable(header)) {
  }
  if (ignorable(header)) return out;
  char delim = ',';
  for (char c : {'\t', ',', ';'}) {
    if (header.find(c) != std::string::npos) {
      delim = c;
      break;
    }
  }
  const auto names = split_fields(header, delim);
  const std::string want = lower(smiles_column);
  std::size_t column = names.size();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (lower(names[i]) == want) column = i;
  if (column == names.size()) throw DataError(fmt::format("no '{}' column in header '{}'", smiles_column, header));
  for (; std::getline(in, line); ++id) {
    if (ignorable(line)) continue;
    const auto fields = split_fields(line, delim);
    out.push_back({id, column < fields.size() ? std::string(fields[column]) : std::string()});
  }
  return out;
}

std::vector<CorpusEntry> read_corpus(const std::filesystem::path &path, CorpusFormat format,
                                     const std::string &smiles_column) {
  std::ifstream in(path);
  if (!in) throw DataError("IOError: cannot open " + path.string());
  return read_corpus(in, format == CorpusFormat::Auto ? detect_format(path) : format, smiles_column);
}

// ---- worker pool ----------------------------------------------------------------

void parallel_chunks(std::size_t n, unsigned workers, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)> &fn) {
  if (n == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, n_chunks));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < n_chunks;) {
      try {
        fn(c * chunk, std::min(n, (c + 1) * chunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (error) std::rethrow_exception(error);
}

// ---- annotation -----------------------------------------------------------------

namespace {

struct PhaseOne {
  std::optional<DescriptorRecord> record;
  std::string error;
};

std::vector<std::string> sorted_top(const PrevalenceTable &table, std::size_t k) {
  auto top = top_k_groups(table, k);
  std::sort(top.begin(), top.end());
  return top;
}

}  // namespace

AnnotateResult annotate_corpus(const std::vector<CorpusEntry> &corpus, const PatternLibrary &library,
                               const std::optional<PrevalenceTable> &table, const TierConfig &tiers,
                               unsigned workers, std::size_t chunk_size) {
  tiers.validate();
  std::vector<PhaseOne> phase(corpus.size());
  parallel_chunks(corpus.size(), workers, chunk_size, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        phase[i].record = descriptor_record_without_rarity(parse_smiles(corpus[i].smiles), library);
      } catch (const SmilesError &e) {
        phase[i].error = e.what();
      } catch (const EmptyMoleculeError &e) {
        phase[i].error = e.what();
      }
    }
  });

  AnnotateResult result;
  PrevalenceCounter counter(library);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (phase[i].record) {
      counter.add(phase[i].record->fg_names);
    } else {
      result.skipped.push_back({corpus[i].id, std::move(phase[i].error)});
    }
  }
  if (counter.molecules() == 0) return result;
  result.table = table ? *table : counter.table();
  const auto top = sorted_top(*result.table, tiers.top_k);

  result.records.resize(counter.molecules());
  std::vector<std::size_t> slot(corpus.size(), 0);
  for (std::size_t i = 0, k = 0; i < corpus.size(); ++i)
    if (phase[i].record) slot[i] = k++;
  parallel_chunks(corpus.size(), workers, chunk_size, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (!phase[i].record) continue;
      AnnotatedRecord &r = result.records[slot[i]];
      r.id = corpus[i].id;
      r.smiles = corpus[i].smiles;
      r.descriptors = std::move(*phase[i].record);
      try {
        r.descriptors.rarity = fg_rarity(r.descriptors.fg_names, *result.table);
      } catch (const std::out_of_range &) {
        throw DataError(fmt::format("prevalence table lacks a group present in molecule {}", r.id));
      }
      r.label = assign_tier(r.descriptors, top, tiers);
    }
  });
  return result;
}

PrevalenceResult corpus_prevalence(const std::vector<CorpusEntry> &corpus,
                                   const PatternLibrary &library, unsigned workers,
                                   std::size_t chunk_size) {
  std::vector<std::optional<std::vector<std::string>>> names(corpus.size());
  std::vector<std::string> errors(corpus.size());
  parallel_chunks(corpus.size(), workers, chunk_size, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        names[i] = group_names(perceive_aromaticity(parse_smiles(corpus[i].smiles)), library);
      } catch (const SmilesError &e) {
        errors[i] = e.what();
      }
    }
  });
  PrevalenceResult result;
  PrevalenceCounter counter(library);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (names[i]) {
      counter.add(*names[i]);
    } else {
      result.skipped.push_back({corpus[i].id, std::move(errors[i])});
    }
  }
  result.table = counter.table();
  result.top_groups = top_k_groups(result.table, 6);
  return result;
}

std::string format_record(const AnnotatedRecord &r) {
  const auto &d = r.descriptors;
  const auto &c = d.counts;
  std::string out;
  out.reserve(256 + r.smiles.size());
  auto it = std::back_inserter(out);
  fmt::format_to(it,
                 "{{\"id\":{},\"smiles\":{},\"d_scaf\":{},\"rarity\":{},\"conjugation\":{},"
                 "\"arom_sub\":{},\"bertz_ct\":{},\"n_ha\":{},\"n_het\":{},\"n_ring\":{},\"n_sc\":{},"
                 "\"n_fg\":{},\"mw\":{},\"fg_names\":[",
                 r.id, Json(r.smiles).dump(), d.d_scaf, d.rarity, d.conjugation, d.arom_sub,
                 d.bertz_ct, c.n_ha, c.n_het, c.n_ring, c.n_sc, d.n_fg, c.mw);
  for (std::size_t i = 0; i < d.fg_names.size(); ++i)
    fmt::format_to(it, "{}\"{}\"", i ? "," : "", d.fg_names[i]);
  fmt::format_to(it, "],\"tier\":\"{}\",\"tier_rule\":\"{}\"}}", to_string(r.label.tier),
                 to_string(r.label.rule));
  return out;
}

// ---- subcommands ------------------------------------------------------------

namespace {

std::vector<CorpusEntry> load_input(const PipelineConfig &cfg) {
  if (cfg.input.empty()) throw DataError("IOError: no input file given");
  return read_corpus(cfg.input, cfg.format, cfg.smiles_column);
}

std::optional<PrevalenceTable> load_table(const PipelineConfig &cfg) {
  if (!cfg.prevalence) return std::nullopt;
  std::ifstream in(*cfg.prevalence);
  if (!in) throw DataError("IOError: cannot open " + cfg.prevalence->string());
  try {
    return PrevalenceTable::read(in);
  } catch (const std::exception &e) {
    throw DataError(fmt::format("{}: {}", cfg.prevalence->string(), e.what()));
  }
}

// Writes to `path`, or stdout for "" / "-".
template <class Fn>
void with_output(const std::filesystem::path &path, Fn &&fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("IOError: cannot write " + path.string());
  fn(out);
  if (!out) throw DataError("IOError: write failed for " + path.string());
}

Json parse_json_line(const std::string &line, std::uint64_t line_no, const std::string &file) {
  try {
    return Json::parse(line);
  } catch (const Json::parse_error &e) {
    throw DataError(fmt::format("{}:{}: invalid JSON ({})", file, line_no, e.what()));
  }
}

}  // namespace

PrevalenceResult cmd_prevalence(const PipelineConfig &cfg) {
  const auto corpus = load_input(cfg);
  PrevalenceResult result;
  try {
    result = corpus_prevalence(corpus, cfg.library(), cfg.workers, cfg.chunk_size);
  } catch (const EmptyCorpusError &e) {
    throw DataError(e.what());
  }
  result.top_groups = top_k_groups(result.table, cfg.tiers.top_k);
  const auto out = cfg.output.empty() ? std::filesystem::path(cfg.input.string() + ".prevalence.tsv")
                                      : cfg.output;
  with_output(out, [&](std::ostream &os) {
    result.table.write(os);
    os << "# top" << cfg.tiers.top_k;
    for (const auto &g : result.top_groups) os << '\t' << g;
    os << '\n';
  });
  return result;
}

AnnotateResult cmd_annotate(const PipelineConfig &cfg) {
  const auto corpus = load_input(cfg);
  auto result = annotate_corpus(corpus, cfg.library(), load_table(cfg), cfg.tiers, cfg.workers,
                                cfg.chunk_size);
  with_output(cfg.output, [&](std::ostream &os) {
    std::string buf;
    for (const auto &r : result.records) {
      buf = format_record(r);
      buf += '\n';
      os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
  });
  return result;
}

TierIndex read_tier_index(const std::filesystem::path &annotated) {
  std::ifstream in(annotated);
  if (!in) throw DataError("IOError: cannot open " + annotated.string());
  TierIndex index;
  std::string line;
  for (std::uint64_t n = 1; std::getline(in, line); ++n) {
    if (ignorable(line)) continue;
    const Json j = parse_json_line(line, n, annotated.string());
    const auto tier_it = j.find("tier");
    std::optional<Tier> tier;
    if (tier_it != j.end() && tier_it->is_string()) tier = parse_tier(tier_it->get<std::string>());
    if (!tier) throw DataError(fmt::format("MissingTierField: {}:{} has no valid \"tier\"", annotated.string(), n));
    const auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_number_unsigned())
      throw DataError(fmt::format("{}:{} has no valid \"id\"", annotated.string(), n));
    index.add(id_it->get<std::uint64_t>(), *tier);
  }
  try {
    index.finalize();
  } catch (const ScheduleError &e) {
    throw DataError(e.what());
  }
  return index;
}

ScheduleReport schedule_from_counts(const TierCounts &counts, const ScheduleSpec &spec) {
  spec.validate();
  ScheduleReport r;
  r.spec = spec;
  r.counts = counts;
  r.total = Fraction(0);
  for (int e = 0; e < spec.epochs; ++e) {
    r.per_epoch.push_back(epoch_budget(counts, spec, e));
    r.total += r.per_epoch.back();
  }
  r.baseline = baseline_budget(counts, spec.epochs);
  r.ratio = r.baseline == 0 ? 0.0 : (r.total / Fraction(static_cast<std::int64_t>(r.baseline))).to_double();
  return r;
}

ScheduleReport cmd_schedule(const PipelineConfig &cfg) {
  if (cfg.input.empty()) throw DataError("IOError: no annotated input given");
  const TierIndex index = read_tier_index(cfg.input);
  ScheduleReport r = schedule_from_counts(index.counts(), cfg.schedule);
  if (!cfg.output.empty()) r.manifest_sizes = write_manifests(index, cfg.schedule, cfg.output, cfg.workers);
  return r;
}

void print_schedule_report(std::ostream &os, const ScheduleReport &r) {
  fmt::print(os, "regime {}  epochs {}  hard_start {}  seed {}\n", to_string(r.spec.regime),
             r.spec.epochs, r.spec.hard_start.str(), r.spec.seed);
  fmt::print(os, "tier counts  T0 {}  T1 {}  T2 {}  T3 {}  T4 {}\n", r.counts[0], r.counts[1],
             r.counts[2], r.counts[3], r.counts[4]);
  fmt::print(os, "{:>5}  {:>16}  {:>16}{}\n", "epoch", "expected_views", "cumulative",
             r.manifest_sizes.empty() ? "" : "  manifest_size");
  Fraction cumulative(0);
  for (std::size_t e = 0; e < r.per_epoch.size(); ++e) {
    cumulative += r.per_epoch[e];
    fmt::print(os, "{:>5}  {:>16}  {:>16}", e, r.per_epoch[e].str(), cumulative.str());
    if (e < r.manifest_sizes.size()) fmt::print(os, "  {:>13}", r.manifest_sizes[e]);
    os << '\n';
  }
  fmt::print(os, "total molecule-views {}\n", r.total.str());
  if (!r.total.is_integer()) fmt::print(os, "total (decimal) {:.6f}\n", r.total.to_double());
  fmt::print(os, "baseline molecule-views {}\n", r.baseline);
  fmt::print(os, "ratio {:.4f}\n", r.ratio);
}

double quantile_sorted(const std::vector<double> &v, double q) {
  if (v.empty()) throw DataError("EmptyInput: quantile of no values");
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw DataError("EmptyInput: no values to summarize");
  std::sort(values.begin(), values.end());
  Summary s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile_sorted(values, 0.5);
  s.p99 = quantile_sorted(values, 0.99);
  return s;
}

StatsReport cmd_stats(const PipelineConfig &cfg) {
  if (cfg.input.empty()) throw DataError("IOError: no annotated input given");
  std::ifstream in(cfg.input);
  if (!in) throw DataError("IOError: cannot open " + cfg.input.string());
  std::vector<double> mw, ct, rings;
  std::array<std::vector<double>, kNumTiers> ct_by_tier;
  StatsReport r;
  std::string line;
  for (std::uint64_t n = 1; std::getline(in, line); ++n) {
    if (ignorable(line)) continue;
    const Json j = parse_json_line(line, n, cfg.input.string());
    try {
      mw.push_back(j.at("mw").get<double>());
      ct.push_back(j.at("bertz_ct").get<double>());
      rings.push_back(j.at("n_ring").get<double>());
    } catch (const Json::exception &e) {
      throw DataError(fmt::format("{}:{}: {}", cfg.input.string(), n, e.what()));
    }
    if (const auto t = j.find("tier"); t != j.end() && t->is_string()) {
      if (auto tier = parse_tier(t->get<std::string>())) {
        ++r.histogram[static_cast<std::size_t>(*tier)];
        ct_by_tier[static_cast<std::size_t>(*tier)].push_back(ct.back());
      }
    }
  }
  if (mw.empty()) throw DataError("EmptyInput: " + cfg.input.string() + " holds no records");
  r.molecules = mw.size();
  r.mw = summarize(mw);
  r.bertz_ct = summarize(ct);
  r.n_ring = summarize(rings);
  for (std::size_t t = 0; t < kNumTiers; ++t) {
    auto &v = ct_by_tier[t];
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    r.ct_quartiles[t] = Quartiles{quantile_sorted(v, 0.25), quantile_sorted(v, 0.5), quantile_sorted(v, 0.75)};
  }
  return r;
}

void print_stats_report(std::ostream &os, const StatsReport &r) {
  fmt::print(os, "molecules {}\n", r.molecules);
  fmt::print(os, "{:<10} {:>12} {:>12} {:>12}\n", "quantity", "mean", "median", "p99");
  auto row = [&](std::string_view name, const Summary &s) {
    fmt::print(os, "{:<10} {:>12.4f} {:>12.4f} {:>12.4f}\n", name, s.mean, s.median, s.p99);
  };
  row("mw", r.mw);
  row("bertz_ct", r.bertz_ct);
  row("n_ring", r.n_ring);
  fmt::print(os, "{:<4} {:>10} {:>12} {:>12} {:>12}\n", "tier", "count", "ct_q1", "ct_median", "ct_q3");
  for (std::size_t t = 0; t < kNumTiers; ++t) {
    fmt::print(os, "{:<4} {:>10}", to_string(static_cast<Tier>(t)), r.histogram[t]);
    if (const auto &q = r.ct_quartiles[t])
      fmt::print(os, " {:>12.4f} {:>12.4f} {:>12.4f}", q->q1, q->q2, q->q3);
    os << '\n';
  }
}

BenchReport cmd_bench(const PipelineConfig &cfg, std::size_t generate, int repeats) {
  std::vector<CorpusEntry> corpus;
  if (cfg.input.empty()) {
    CorpusGenOptions opt;
    opt.count = generate;
    opt.seed = cfg.seed;
    auto smiles = generate_corpus(opt);
    corpus.reserve(smiles.size());
    for (std::size_t i = 0; i < smiles.size(); ++i) corpus.push_back({i, std::move(smiles[i])});
  } else {
    corpus = load_input(cfg);
  }
  if (corpus.empty()) throw DataError("EmptyInput: nothing to benchmark");
  const auto table = load_table(cfg);
  const PatternLibrary &lib = cfg.library();

  auto best_seconds = [&](unsigned workers) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < std::max(repeats, 1); ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = annotate_corpus(corpus, lib, table, cfg.tiers, workers, cfg.chunk_size);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (res.records.empty()) throw DataError("EmptyInput: no molecule in the benchmark corpus parsed");
      best = std::min(best, dt.count());
    }
    return best;
  };

  BenchReport r;
  r.molecules = corpus.size();
  r.workers = std::max(cfg.workers, 1u);
  r.hardware_threads = std::thread::hardware_concurrency();
  const double n = static_cast<double>(corpus.size());
  const double t1 = best_seconds(1);
  r.single_ms_per_mol = 1e3 * t1 / n;
  r.single_mol_per_s = n / t1;
  const double tn = r.workers == 1 ? t1 : best_seconds(r.workers);
  r.parallel_ms_per_mol = 1e3 * tn / n;
  r.parallel_mol_per_s = n / tn;
  r.speedup = t1 / tn;
  r.efficiency = r.speedup / r.workers;
  return r;
}

void print_bench_report(std::ostream &os, const BenchReport &r) {
  fmt::print(os, "molecules {}  hardware_threads {}\n", r.molecules, r.hardware_threads);
  fmt::print(os, "{:<10} {:>10} {:>12}\n", "workers", "ms/mol", "mol/s");
  fmt::print(os, "{:<10} {:>10.4f} {:>12.1f}\n", 1, r.single_ms_per_mol, r.single_mol_per_s);
  fmt::print(os, "{:<10} {:>10.4f} {:>12.1f}\n", r.workers, r.parallel_ms_per_mol, r.parallel_mol_per_s);
  fmt::print(os, "speedup {:.3f}  efficiency {:.3f}\n", r.speedup, r.efficiency);
}

}  // namespace molcurr
