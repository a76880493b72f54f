#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "molcurr/corpus_gen.hpp"
#include "molcurr/descriptors.hpp"
#include "molcurr/smiles.hpp"
#include "oracles.hpp"
#include "tier_suite.hpp"

using namespace molcurr;

namespace {

MolecularGraph mol(std::string_view s) { return perceive_aromaticity(parse_smiles(s)); }

std::vector<std::string> sample_corpus() {
  CorpusGenOptions opt;
  opt.count = 300;
  opt.seed = 3;
  auto v = generate_corpus(opt);
  for (const auto &c : suite::kTierCases) v.emplace_back(c.smiles);
  for (std::string_view s : {"c1ccc2ccccc2c1", "C1CC2CCC1C2", "O=C1CCCCC1CCc1ccccc1C", "CC(C)(C)C",
                             "c1ccc(-c2ccccc2)cc1", "Cc1cc(C)c2ccccc2c1", "C=CC=CC=O", "N#CC#N"})
    v.emplace_back(s);
  return v;
}

}  // namespace

TEST(ScaffoldDecoration, Examples) {
  EXPECT_NEAR(scaffold_decoration(mol("Cc1ccccc1")), 1.0 / 7.0, 5e-5);
  EXPECT_EQ(scaffold_decoration(mol("c1ccccc1")), 0.0);
  EXPECT_EQ(scaffold_decoration(mol("CCCCCC")), 1.0);
  EXPECT_THROW(descriptor_record_without_rarity(parse_smiles("[H][H]")), EmptyMoleculeError);
}

TEST(Rarity, Examples) {
  PrevalenceTable t;
  t.prevalence = {{"carbonyl", 0.661}, {"carboxylic_acid", 0.1}, {"hydroxyl", 0.3}, {"iodide", 0.011}};
  EXPECT_EQ(fg_rarity(std::vector<std::string>{}, t), 0.0);
  EXPECT_NEAR(fg_rarity({"carbonyl"}, t), 0.339, 1e-12);
  EXPECT_NEAR(fg_rarity({"carbonyl", "carboxylic_acid", "hydroxyl"}, t),
              ((1 - 0.661) + (1 - 0.1) + (1 - 0.3)) / 3.0, 1e-12);
  EXPECT_NEAR(fg_rarity(mol("Ic1ccccc1"), t), 0.989, 1e-12);
  EXPECT_EQ(fg_rarity(mol("CCCC"), t), 0.0);
}

TEST(ConjugationExtent, Examples) {
  EXPECT_EQ(conjugation_extent(mol("C=Cc1ccccc1")), 8);
  EXPECT_EQ(conjugation_extent(mol("CCCC")), 0);
  EXPECT_EQ(conjugation_extent(mol("C=CC=C")), 4);
  EXPECT_EQ(conjugation_extent(mol("C=CCC=C")), 2);
}

TEST(GapPattern, Canonicalisation) {
  EXPECT_TRUE(ring_gap_pattern({false, false, false}).empty());
  EXPECT_EQ(ring_gap_pattern({true, false, false, false, false, false}), (std::vector<int>{6}));
  EXPECT_EQ(ring_gap_pattern({true, false, false, true, false, false}), (std::vector<int>{3, 3}));
  // ortho, meta, para give distinct patterns; rotations collapse.
  const auto ortho = ring_gap_pattern({true, true, false, false, false, false});
  EXPECT_EQ(ortho, ring_gap_pattern({false, false, false, true, true, false}));
  EXPECT_NE(ortho, ring_gap_pattern({true, false, true, false, false, false}));
  // 1,2,4 read in either direction.
  EXPECT_EQ(ring_gap_pattern({true, true, false, true, false, false}),
            ring_gap_pattern({true, false, true, true, false, false}));
}

TEST(AromaticSubstitution, Examples) {
  EXPECT_EQ(aromatic_substitution_complexity(mol("Cc1ccc(C)cc1")), 3);
  EXPECT_EQ(aromatic_substitution_complexity(mol("c1ccccc1")), 0);
  EXPECT_EQ(aromatic_substitution_complexity(mol("CCCC")), 0);
  EXPECT_EQ(aromatic_substitution_complexity(mol("Oc1ccccc1")), 2);
  // naphthalene: each ring has two fusion positions, same pattern
  EXPECT_EQ(aromatic_substitution_complexity(mol("c1ccc2ccccc2c1")), 5);
}

TEST(BertzCT, Examples) {
  EXPECT_NEAR(bertz_ct(mol("CCC")), 1.0, 1e-12);
  EXPECT_NEAR(bertz_ct(mol("c1ccccc1")), 7.7549, 5e-5);
  EXPECT_EQ(bertz_ct(mol("C")), 0.0);
  EXPECT_EQ(bertz_ct(mol("CC")), 0.0);
}

TEST(Descriptors, AgreeWithOracles) {
  const auto table = suite::fixed_table();
  for (const auto &s : sample_corpus()) {
    const auto g = mol(s);
    EXPECT_NEAR(bertz_ct(g), oracle::bertz_ct(g), 1e-12) << s;
    EXPECT_NEAR(scaffold_decoration(g), oracle::scaffold_decoration(g), 1e-12) << s;
    EXPECT_EQ(conjugation_extent(g), oracle::conjugation_extent(g)) << s;
    EXPECT_EQ(aromatic_substitution_complexity(g), oracle::aromatic_substitution(g)) << s;
    const auto names = group_names(g, PatternLibrary::default_library());
    EXPECT_NEAR(fg_rarity(names, table), oracle::rarity(names, table), 1e-12) << s;
  }
}

TEST(Descriptors, InvariantUnderReindexingAndRoundTrip) {
  std::mt19937_64 rng(17);
  const auto table = suite::fixed_table();
  for (const auto &s : sample_corpus()) {
    const auto g = parse_smiles(s);
    const auto ref = descriptor_record(g, table);
    std::vector<std::uint32_t> perm(g.num_atoms());
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (const auto &h : {oracle::permute(g, perm), parse_smiles(write_smiles(g))}) {
      const auto r = descriptor_record(h, table);
      EXPECT_NEAR(r.d_scaf, ref.d_scaf, 1e-12) << s;
      EXPECT_NEAR(r.bertz_ct, ref.bertz_ct, 1e-12) << s;
      EXPECT_NEAR(r.rarity, ref.rarity, 1e-12) << s;
      EXPECT_EQ(r.conjugation, ref.conjugation) << s;
      EXPECT_EQ(r.arom_sub, ref.arom_sub) << s;
      EXPECT_EQ(r.fg_names, ref.fg_names) << s;
      EXPECT_EQ(r.counts.n_ring, ref.counts.n_ring) << s;
    }
  }
}

TEST(Descriptors, RecordFields) {
  const auto r = descriptor_record(parse_smiles("CC(=O)O"), suite::fixed_table());
  EXPECT_EQ(r.n_fg, 3);
  EXPECT_EQ(r.counts.n_ha, 4);
  EXPECT_EQ(r.counts.n_het, 2);
  EXPECT_EQ(r.d_scaf, 1.0);
  EXPECT_EQ(r.fg_names, (std::vector<std::string>{"carbonyl", "carboxylic_acid", "hydroxyl"}));
}
