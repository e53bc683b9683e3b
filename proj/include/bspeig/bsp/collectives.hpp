#pragma once

#include <span>
#include <vector>

#include "bspeig/bsp/engine.hpp"
#include "bspeig/matrix.hpp"

namespace bspeig::bsp {

enum class Axis { rows, cols };

// Each collective over a group of two or more costs exactly one superstep. A singleton
// group is a local no-op.

// Concatenates group[i]'s piece in member order at the root.
Matrix collective_gather(Engine& engine, std::span<const Matrix> pieces, std::span<const int> group, int root,
                         Axis axis = Axis::rows);

// Every member receives the concatenation.
std::vector<Matrix> collective_allgather(Engine& engine, std::span<const Matrix> pieces,
                                         std::span<const int> group, Axis axis = Axis::rows);

// Sums equally shaped blocks and leaves member i with balanced slice i along axis.
// Contributions are added in ascending member order.
std::vector<Matrix> collective_reduce_scatter(Engine& engine, std::span<const Matrix> blocks,
                                              std::span<const int> group, Axis axis = Axis::rows);

// Slice bounds used by reduce-scatter: member i gets [offsets[i], offsets[i+1]).
std::vector<Index> scatter_offsets(Index extent, int members);

Matrix concat(std::span<const Matrix> pieces, Axis axis);

}  // namespace bspeig::bsp
