#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "span/sampling/sampler.hpp"

namespace span::sampling {

// One pair per line, tab-separated:
//   t  n  node,node,...  current-bits  next-bits  p,p,...
// Bit strings are the row-major n*n adjacency as '0'/'1'; P values are printed
// with 17 significant digits so they reload exactly.
void write_pair(std::ostream& out, const SubgraphPair& pair);
void write_pairs(std::ostream& out, const std::vector<SubgraphPair>& pairs);
std::vector<SubgraphPair> read_pairs(std::istream& in);

}  // namespace span::sampling
