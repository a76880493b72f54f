#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "molcurr/corpus_gen.hpp"
#include "molcurr/pipeline.hpp"
#include "molcurr/smiles.hpp"

using namespace molcurr;

namespace {

std::filesystem::path temp_file(const std::string &name, const std::string &content) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

std::string annotate_text(const std::vector<CorpusEntry> &corpus, unsigned workers, std::size_t chunk) {
  const auto r = annotate_corpus(corpus, PatternLibrary::default_library(), std::nullopt, {}, workers, chunk);
  std::string out;
  for (const auto &rec : r.records) out += format_record(rec) + '\n';
  return out;
}

}  // namespace

TEST(ReadCorpus, SmiFormat) {
  std::istringstream in("CCO ethanol\n\n# comment\n  c1ccccc1\tbenzene\nCC\n");
  const auto c = read_corpus(in, CorpusFormat::Smi);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].smiles, "CCO");
  EXPECT_EQ(c[1].id, 3u);
  EXPECT_EQ(c[1].smiles, "c1ccccc1");
  EXPECT_EQ(c[2].id, 4u);
}

TEST(ReadCorpus, DelimitedFormats) {
  for (char d : {',', '\t', ';'}) {
    std::string text = std::string("name") + d + "SMILES" + d + "x\n" + "a" + d + "CCO" + d + "1\n" + "b" + d +
                       "CCN" + d + "2\n";
    std::istringstream in(text);
    const auto c = read_corpus(in, CorpusFormat::Delimited, "smiles");
    ASSERT_EQ(c.size(), 2u) << d;
    EXPECT_EQ(c[0].smiles, "CCO");
    EXPECT_EQ(c[1].smiles, "CCN");
  }
  std::istringstream bad("name,structure\na,CCO\n");
  EXPECT_THROW(read_corpus(bad, CorpusFormat::Delimited, "smiles"), DataError);
  EXPECT_THROW(read_corpus(std::filesystem::path("/nonexistent/x.smi"), CorpusFormat::Auto), DataError);
}

TEST(Annotate, MalformedLinesAreSkipped) {
  std::vector<CorpusEntry> corpus;
  const char *smiles[] = {"CCO", "CC(=O)O", "c1ccccc1", "C1CC", "CCN", "CCCl", "Oc1ccccc1", "CC#N", "CCOC", "CCC"};
  for (std::uint64_t i = 0; i < 10; ++i) corpus.push_back({i, smiles[i]});
  const auto r = annotate_corpus(corpus, PatternLibrary::default_library(), std::nullopt, {}, 3, 2);
  EXPECT_EQ(r.records.size(), 9u);
  ASSERT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(r.skipped[0].id, 3u);
  ASSERT_TRUE(r.table.has_value());
  EXPECT_EQ(r.table->corpus_size, 9u);
}

TEST(Annotate, OutputIndependentOfWorkersAndChunks) {
  CorpusGenOptions opt;
  opt.count = 500;
  opt.seed = 9;
  std::vector<CorpusEntry> corpus;
  for (const auto &s : generate_corpus(opt)) corpus.push_back({corpus.size(), s});
  const auto ref = annotate_text(corpus, 1, 256);
  EXPECT_EQ(annotate_text(corpus, 4, 7), ref);
  EXPECT_EQ(annotate_text(corpus, 16, 1), ref);
}

TEST(Annotate, RecordFormat) {
  const auto r = annotate_corpus({{0, "CCCCCC"}}, PatternLibrary::default_library(), std::nullopt, {}, 1);
  ASSERT_EQ(r.records.size(), 1u);
  const auto line = format_record(r.records[0]);
  EXPECT_EQ(line.rfind("{\"id\":0,\"smiles\":\"CCCCCC\"", 0), 0u) << line;
  EXPECT_NE(line.find("\"tier\":\"T0\""), std::string::npos);
  EXPECT_NE(line.find("\"tier_rule\":\"T0:no_heteroatoms\""), std::string::npos);
}

TEST(ParallelChunks, CoversRangeAndPropagatesErrors) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_chunks(hits.size(), 4, 33, [&](std::size_t b, std::size_t e) {
    for (auto i = b; i < e; ++i) ++hits[i];
  });
  for (const auto &h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_chunks(100, 3, 10,
                               [](std::size_t b, std::size_t) {
                                 if (b == 50) throw std::runtime_error("boom");
                               }),
               std::runtime_error);
}

TEST(Stats, QuantilesAndSingleMolecule) {
  EXPECT_EQ(quantile_sorted({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_EQ(quantile_sorted({5}, 0.99), 5.0);
  EXPECT_NEAR(quantile_sorted({0, 10}, 0.25), 2.5, 1e-12);
  EXPECT_THROW(quantile_sorted({}, 0.5), DataError);

  PipelineConfig cfg;
  cfg.input = temp_file("molcurr_stats_one.jsonl",
                        "{\"id\":0,\"mw\":86.18,\"bertz_ct\":4.0,\"n_ring\":0,\"tier\":\"T0\"}\n");
  const auto r = cmd_stats(cfg);
  EXPECT_EQ(r.molecules, 1u);
  EXPECT_EQ(r.mw.mean, 86.18);
  EXPECT_EQ(r.mw.median, 86.18);
  EXPECT_EQ(r.mw.p99, 86.18);
  EXPECT_EQ(r.histogram[0], 1u);
  ASSERT_TRUE(r.ct_quartiles[0].has_value());
  EXPECT_EQ(r.ct_quartiles[0]->q2, 4.0);

  cfg.input = temp_file("molcurr_stats_empty.jsonl", "\n");
  EXPECT_THROW(cmd_stats(cfg), DataError);
}

TEST(Schedule, MissingTierField) {
  const auto p = temp_file("molcurr_sched_bad.jsonl", "{\"id\":0,\"tier\":\"T1\"}\n{\"id\":1}\n");
  EXPECT_THROW(read_tier_index(p), DataError);
  const auto ok = temp_file("molcurr_sched_ok.jsonl", "{\"id\":0,\"tier\":\"T1\"}\n{\"id\":1,\"tier\":\"T3\"}\n");
  EXPECT_EQ(read_tier_index(ok).counts(), (TierCounts{0, 1, 0, 1, 0}));
}

TEST(Schedule, ReportFromCounts) {
  ScheduleSpec s;
  const auto r = schedule_from_counts({268, 107370, 153955, 703283, 35124}, s);
  EXPECT_EQ(r.total, Fraction(5740728));
  EXPECT_EQ(r.baseline, 10000000u);
  std::ostringstream os;
  print_schedule_report(os, r);
  EXPECT_NE(os.str().find("ratio 0.5741"), std::string::npos) << os.str();
}
