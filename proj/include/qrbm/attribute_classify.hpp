#pragma once

#include "qrbm/rbm_core.hpp"

namespace qrbm {

/// alpha_ik = 1 iff P(alpha_k = 1 | R_i) >= threshold.
AttributeMatrix classify_attributes(const RbmParams& params, const ResponseMatrix& data,
                                    double threshold = 0.5);

/// Per-attribute agreement rate after Hungarian alignment of a_hat's columns
/// to a_true's.
Vector acc(const AttributeMatrix& a_hat, const AttributeMatrix& a_true);

} // namespace qrbm
