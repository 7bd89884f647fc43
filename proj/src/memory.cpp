#include "ltmn/memory.hpp"

#include "ltmn/errors.hpp"

namespace ltmn::memory {

ad::Node attend(ad::Node query, ad::Node memories) {
  if (memories.cols() == 0) throw ContractError("question with no prior sentences");
  if (query.cols() != 1 || query.rows() != memories.rows()) {
    throw DimensionError("attend: query " + ad::shape_str(query.value()) + " vs memories " +
                         ad::shape_str(memories.value()));
  }
  return ad::softmax(ad::matmul(ad::transpose(memories), query));
}

ad::Node read(ad::Node attention, ad::Node memories) {
  if (attention.cols() != 1 || attention.rows() != memories.cols()) {
    throw DimensionError("read: attention " + ad::shape_str(attention.value()) +
                         " vs memories " + ad::shape_str(memories.value()));
  }
  return ad::matmul(memories, attention);
}

HopResult hop(ad::Node query, ad::Node memories, std::size_t hops) {
  if (hops < 1) throw ContractError("hop count must be at least 1");
  HopResult r;
  ad::Node u = query;
  for (std::size_t k = 0; k < hops; ++k) {
    if (k > 0) u = ad::add(u, r.output);
    ad::Node p = attend(u, memories);
    r.attention.push_back(p);
    r.output = read(p, memories);
  }
  r.query = u;
  return r;
}

}  // namespace ltmn::memory
