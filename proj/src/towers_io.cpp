#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jnp/towers.hpp"

namespace jnp {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExtReal read_triple(std::istream& in) {
  int s = 0;
  double m = 0;
  long long e = 0;
  if (!(in >> s >> m >> e)) throw std::runtime_error("towerset: malformed number triple");
  return ExtReal::compose(s, m, e);
}

std::string expect_key(std::istream& in, const char* key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(std::string("towerset: missing ") + key);
  std::istringstream ls(line);
  std::string k;
  ls >> k;
  if (k != key) throw std::runtime_error("towerset: expected '" + std::string(key) + "', got '" + k + "'");
  std::string rest;
  std::getline(ls >> std::ws, rest);
  return rest;
}

}  // namespace

void TowerSet::write(std::ostream& os) const {
  os << "towerset 1\n";
  os << "family " << to_string(schedule_.family()) << '\n';
  os << "p " << fmt_double(schedule_.p()) << '\n';
  os << "power " << fmt_double(power_) << '\n';
  os << "depth " << depth_ << '\n';
  os << "origin " << origin_.to_ext().to_triple() << '\n';
  os << "custom_s " << schedule_.custom_s().size();
  for (double v : schedule_.custom_s()) os << ' ' << fmt_double(v);
  os << '\n';
  os << "nodes " << node_count() << '\n';
  for_each_node([&](const TowerNode& n) {
    os << n.level << ' ' << n.path_bits() << ' ' << n.interval.start.to_ext().to_triple() << ' '
       << n.interval.end.to_ext().to_triple() << ' ' << n.left.to_triple() << ' '
       << n.right.to_triple() << '\n';
  });
}

TowerSet TowerSet::read(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "towerset 1")
    throw std::runtime_error("towerset: bad header line");
  Family fam = parse_family(expect_key(is, "family"));
  double p = std::stod(expect_key(is, "p"));
  double power = std::stod(expect_key(is, "power"));
  int depth = std::stoi(expect_key(is, "depth"));
  std::istringstream origin_line(expect_key(is, "origin"));
  ExtReal origin = read_triple(origin_line);
  std::istringstream ss(expect_key(is, "custom_s"));
  std::size_t count = 0;
  ss >> count;
  std::vector<double> s(count);
  for (auto& v : s) {
    if (!(ss >> v)) throw std::runtime_error("towerset: short custom_s list");
  }
  TowerSet ts = build(Schedule::of(fam, p, std::move(s)), depth, power, Coord(origin));
  std::uint64_t nodes = std::stoull(expect_key(is, "nodes"));
  if (nodes != ts.node_count()) throw std::runtime_error("towerset: node count mismatch");

  std::uint64_t seen = 0;
  ts.for_each_node([&](const TowerNode& n) {
    if (!std::getline(is, line)) throw std::runtime_error("towerset: truncated node list");
    std::istringstream ls(line);
    int level = 0;
    std::string bits;
    ls >> level >> bits;
    ExtReal start = read_triple(ls);
    ExtReal end = read_triple(ls);
    ExtReal left = read_triple(ls);
    ExtReal right = read_triple(ls);
    if (level != n.level || bits != n.path_bits() || !(start == n.interval.start.to_ext()) ||
        !(end == n.interval.end.to_ext()) || !(left == n.left) || !(right == n.right))
      throw std::runtime_error("towerset: node line " + std::to_string(seen + 1) +
                               " disagrees with the rebuilt construction");
    ++seen;
  });
  return ts;
}

}  // namespace jnp
