#include "cubesq/serialize.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace cubesq {

namespace {

void put_u64(std::ostream& os, u64 v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b.data(), 8);
}

u64 get_u64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw Error("WCL1: truncated input");
    u64 v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
    return v;
}

}  // namespace

PairTable to_pairs(const WeightTable& t) {
    PairTable p{static_cast<char>(t.role), {}};
    p.rows.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p.rows.emplace_back(t.support[i], t.multiplicity[i]);
    return p;
}

PairTable to_pairs(const CubeSumSieve& s) {
    PairTable p{'c', {}};
    for (u64 n : s.members()) p.rows.emplace_back(n, s.has_counts() ? s.r3(n) : 1);
    return p;
}

PairTable to_pairs(const SmoothSet& s) {
    PairTable p{'s', {}};
    for (u64 m : s.members) p.rows.emplace_back(m, 1);
    return p;
}

WeightTable weight_table_from_pairs(const PairTable& p) {
    if (p.role != 'a' && p.role != 'b') throw Error("WCL1: not a weight table (role tag '" + std::string(1, p.role) + "')");
    WeightTable t;
    t.role = p.role == 'a' ? Role::a : Role::b;
    for (const auto& [v, m] : p.rows) {
        t.support.push_back(v);
        t.multiplicity.push_back(m);
    }
    return t;
}

void write_binary(std::ostream& os, const PairTable& t) {
    os.write("WCL1", 4);
    os.put(t.role);
    put_u64(os, t.rows.size());
    for (const auto& [v, m] : t.rows) {
        put_u64(os, v);
        put_u64(os, m);
    }
}

PairTable read_binary(std::istream& is) {
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), 4) || std::string(magic.data(), 4) != "WCL1") throw Error("WCL1: bad magic");
    PairTable t;
    if (!is.get(t.role)) throw Error("WCL1: truncated input");
    const u64 n = get_u64(is);
    t.rows.reserve(static_cast<std::size_t>(std::min<u64>(n, u64{1} << 24)));
    for (u64 i = 0; i < n; ++i) {
        const u64 v = get_u64(is);
        const u64 m = get_u64(is);
        t.rows.emplace_back(v, m);
    }
    return t;
}

void write_csv(std::ostream& os, const PairTable& t) {
    os << "value,multiplicity\n";
    for (const auto& [v, m] : t.rows) os << v << ',' << m << '\n';
}

void write_binary_file(const std::string& path, const PairTable& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_binary(os, t);
}

PairTable read_binary_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_binary(is);
}

}  // namespace cubesq
