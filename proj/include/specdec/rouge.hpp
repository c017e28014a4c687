#pragma once

#include <span>

#include "specdec/dist.hpp"

namespace specdec {

enum class RougeVariant { rouge1, rouge2, rougeL };
const char* to_string(RougeVariant variant);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// N-gram overlap (rouge1/rouge2, clipped counts) or longest common
// subsequence (rougeL) precision/recall/F1 over token-id sequences. Swapping
// candidate and reference swaps precision and recall exactly. Throws
// EmptyReferenceError on an empty reference.
RougeScore rouge(std::span<const TokenId> candidate, std::span<const TokenId> reference,
                 RougeVariant variant);

}  // namespace specdec
