#pragma once

// Soft attention over sentence memories and the weighted readout.

#include <cstddef>
#include <vector>

#include "ltmn/autodiff.hpp"

namespace ltmn::memory {

// p = softmax(M^T u) over the n columns of `memories` (d x n); returns n x 1.
// Throws ContractError when there are no memories.
ad::Node attend(ad::Node query, ad::Node memories);

// o = sum_i p_i m_i = M p; returns d x 1.
ad::Node read(ad::Node attention, ad::Node memories);

struct HopResult {
  ad::Node output;                    // o^K
  ad::Node query;                     // u^K, the query used by the last hop
  std::vector<ad::Node> attention;    // p^1 .. p^K
};

// K attend/read passes with u^{k+1} = u^k + o^k. All hops share the same
// memories. K = 1 is a single attend followed by read.
HopResult hop(ad::Node query, ad::Node memories, std::size_t hops);

}  // namespace ltmn::memory
