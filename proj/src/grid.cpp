#include "fracdiff/grid.hpp"

#include "fracdiff/errors.hpp"

namespace fracdiff {

GridFunction::GridFunction(std::size_t intervals) : values_(intervals + 1, 0.0) {
  if (intervals == 0) throw InvalidSpec("grid needs at least one interval");
}

GridFunction::GridFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InvalidSpec("grid needs at least two nodes");
}

GridFunction GridFunction::sample(std::size_t intervals,
                                  const std::function<double(double)>& f) {
  GridFunction g(intervals);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = f(g.node(j));
  return g;
}

}  // namespace fracdiff
