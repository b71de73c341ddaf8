#include "span/sampling/pair_io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>

#include "span/graph/temporal_graph.hpp"

namespace span::sampling {

namespace {

std::string bits(const InducedSubgraph& sg) {
  std::string s(sg.adjacency.size(), '0');
  for (std::size_t i = 0; i < sg.adjacency.size(); ++i) s[i] = sg.adjacency[i] ? '1' : '0';
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

InducedSubgraph parse_bits(const std::string& s, const std::vector<NodeId>& nodes, std::size_t line) {
  const std::size_t n = nodes.size();
  if (s.size() != n * n) throw graph::ParseError(line, "adjacency bit string has wrong length");
  InducedSubgraph sg{nodes, std::vector<std::uint8_t>(n * n)};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw graph::ParseError(line, "adjacency bits must be 0 or 1");
    sg.adjacency[i] = s[i] == '1' ? 1 : 0;
  }
  return sg;
}

}  // namespace

void write_pair(std::ostream& out, const SubgraphPair& pair) {
  out << pair.t << '\t' << pair.size() << '\t';
  for (std::size_t i = 0; i < pair.nodes.size(); ++i) out << (i ? "," : "") << pair.nodes[i];
  out << '\t' << bits(pair.current) << '\t' << bits(pair.next) << '\t';
  char buf[32];
  for (std::size_t i = 0; i < pair.attention.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", pair.attention.values[i]);
    out << (i ? "," : "") << buf;
  }
  out << '\n';
}

void write_pairs(std::ostream& out, const std::vector<SubgraphPair>& pairs) {
  for (const auto& p : pairs) write_pair(out, p);
}

std::vector<SubgraphPair> read_pairs(std::istream& in) {
  std::vector<SubgraphPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 6) throw graph::ParseError(line_no, "expected 6 tab-separated fields");
    try {
      SubgraphPair p;
      p.t = std::stoull(fields[0]);
      std::size_t n = std::stoull(fields[1]);
      for (const auto& id : split(fields[2], ',')) p.nodes.push_back(static_cast<NodeId>(std::stoul(id)));
      if (p.nodes.size() != n) throw graph::ParseError(line_no, "node count does not match n");
      p.current = parse_bits(fields[3], p.nodes, line_no);
      p.next = parse_bits(fields[4], p.nodes, line_no);
      auto values = split(fields[5], ',');
      if (values.size() != n * n) throw graph::ParseError(line_no, "attention matrix has wrong length");
      p.attention.n = n;
      for (const auto& v : values) p.attention.values.push_back(std::stod(v));
      out.push_back(std::move(p));
    } catch (const graph::ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw graph::ParseError(line_no, e.what());
    }
  }
  return out;
}

}  // namespace span::sampling
