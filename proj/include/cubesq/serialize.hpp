// serialize.hpp
//
// Binary and CSV formats for weight tables, smooth sets and cube-sum sieves.
//
// Binary layout (all integers little-endian):
//   bytes 0..3   magic "WCL1"
//   byte  4      role tag: 'a' / 'b' weight tables, 'c' cube-sum sieve,
//                's' smooth set
//   bytes 5..12  u64 number of pairs
//   then         (value u64, multiplicity u64) pairs, ascending value
//
// A sieve stores (n, r3(n)) when built with counts and (n, 1) otherwise.
// CSV: header line "value,multiplicity" then one pair per line.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cubesq/cube_core.hpp"

namespace cubesq {

struct PairTable {
    char role = 'a';
    std::vector<std::pair<u64, u64>> rows;
};

PairTable to_pairs(const WeightTable& t);
PairTable to_pairs(const CubeSumSieve& s);
PairTable to_pairs(const SmoothSet& s);
WeightTable weight_table_from_pairs(const PairTable& p);

void write_binary(std::ostream& os, const PairTable& t);
PairTable read_binary(std::istream& is);  // throws Error on malformed input

void write_csv(std::ostream& os, const PairTable& t);

void write_binary_file(const std::string& path, const PairTable& t);
PairTable read_binary_file(const std::string& path);

}  // namespace cubesq
