#include <gtest/gtest.h>

#include <sstream>

#include "qcpt/errors.hpp"
#include "qcpt/integrals.hpp"
#include "support.hpp"

using namespace qcpt;

namespace {

IntegralSet parse(const std::string& s) {
  std::istringstream in(s);
  return parse_fcidump(in);
}

const char* kTiny =
    " &FCI NORB=2,NELEC=2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"
    " 0.5 1 1 1 1\n 0.25 2 2 1 1\n 0.1 2 1 2 1\n 0.4 2 2 2 2\n"
    " -1.0 1 1 0 0\n 0.05 2 1 0 0\n -0.5 2 2 0 0\n 0.7 0 0 0 0\n";

}  // namespace

TEST(Fcidump, ParsesHeaderAndExpandsSymmetry) {
  const IntegralSet ints = parse(kTiny);
  EXPECT_EQ(ints.norb, 2);
  EXPECT_EQ(ints.n_electrons, 2);
  EXPECT_EQ(ints.ms2, 0);
  EXPECT_DOUBLE_EQ(ints.e_nuc_core, 0.7);
  EXPECT_DOUBLE_EQ(ints.h(0, 1), 0.05);
  EXPECT_DOUBLE_EQ(ints.h(1, 0), 0.05);
  EXPECT_DOUBLE_EQ(ints.g(0, 0, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(ints.g(1, 1, 0, 0), 0.25);
  EXPECT_DOUBLE_EQ(ints.g(0, 1, 1, 0), 0.1);
  EXPECT_DOUBLE_EQ(ints.g(1, 0, 0, 1), 0.1);
  EXPECT_NO_THROW(ints.check_symmetry());
}

TEST(Fcidump, AcceptsFortranExponentsAndSlashTerminator) {
  const IntegralSet ints = parse("$FCI NORB=1,NELEC=1,MS2=1 /\n 1.5D-01 1 1 1 1\n -2.0d0 1 1 0 0\n");
  EXPECT_DOUBLE_EQ(ints.g(0, 0, 0, 0), 0.15);
  EXPECT_DOUBLE_EQ(ints.h(0, 0), -2.0);
}

TEST(Fcidump, MissingKeysAndBadLinesAreParseErrors) {
  EXPECT_THROW(parse(" &FCI NELEC=2,\n &END\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2,\n 0.1 1 1 1 1\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 1 1 1\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 3 1 1 1\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 1 0 1 1\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n abc 1 1 1 1\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2,UHF=.TRUE. &END\n"), ParseError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2,ORBSYM=1 &END\n"), ParseError);
}

TEST(Fcidump, ParseErrorCarriesLineNumber) {
  try {
    parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 1 1 1 1\n 0.2 1 1 2\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Fcidump, ConflictingDuplicateIsAConsistencyError) {
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 2 1 1 1\n 0.2 1 2 1 1\n"), ConsistencyError);
  EXPECT_NO_THROW(parse(" &FCI NORB=2,NELEC=2 &END\n 0.1 2 1 1 1\n 0.1 1 2 1 1\n"));
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=5 &END\n"), ConsistencyError);
  EXPECT_THROW(parse(" &FCI NORB=2,NELEC=2,MS2=1 &END\n"), ConsistencyError);
}

TEST(Fcidump, RoundTripIsExact) {
  for (const char* name : {"h4_r1.00_sto3g", "lih_r1.60_sto3g"}) {
    const IntegralSet a = read_fcidump(qcpt::testing::fixture(name));
    std::stringstream ss;
    write_fcidump(ss, a);
    const IntegralSet b = parse_fcidump(ss);
    EXPECT_EQ(a.norb, b.norb);
    EXPECT_EQ(a.n_electrons, b.n_electrons);
    EXPECT_EQ(a.e_nuc_core, b.e_nuc_core);
    EXPECT_EQ((a.h - b.h).cwiseAbs().maxCoeff(), 0.0);
    for (size_t i = 0; i < a.g.data().size(); ++i) ASSERT_EQ(a.g.data()[i], b.g.data()[i]);
  }
}

TEST(Fcidump, ShippedFixturesAreSymmetric) {
  for (const char* name : {"h2_r0.74_sto3g", "h3_r1.00_sto3g", "h5_r1.00_sto3g", "h6_r1.00_sto3g", "lih_r2.00_sto3g"}) {
    const IntegralSet ints = read_fcidump(qcpt::testing::fixture(name));
    EXPECT_NO_THROW(ints.check_symmetry(1e-10)) << name;
  }
}

TEST(Partition, CountsAndElectronBookkeeping) {
  const IntegralSet ints = read_fcidump(qcpt::testing::fixture("lih_r1.60_sto3g"));
  const SpacePartition p = load_partition(1, 2, ints);
  EXPECT_EQ(p.core, std::vector<int>({0}));
  EXPECT_EQ(p.active, std::vector<int>({1, 2}));
  EXPECT_EQ(p.virt, std::vector<int>({3, 4, 5}));
  EXPECT_EQ(active_electron_count(p, ints), 2);
  EXPECT_THROW(load_partition(3, 4, ints), InputError);
  EXPECT_THROW(load_partition(3, 1, ints), InputError);  // 6 core electrons > 4
  EXPECT_THROW(load_partition(0, 1, ints), InputError);  // 4 electrons in one orbital
}

TEST(Fcidump, MissingFileIsAnIoError) { EXPECT_THROW(read_fcidump("/nonexistent/x.fcidump"), IoError); }
