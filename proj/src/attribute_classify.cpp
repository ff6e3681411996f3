#include "qrbm/attribute_classify.hpp"

#include <string>

#include "qrbm/errors.hpp"
#include "qrbm/evaluation.hpp"

namespace qrbm {

AttributeMatrix classify_attributes(const RbmParams& params, const ResponseMatrix& data,
                                    double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw InvalidArgument("classification threshold must lie in (0, 1)");
    params.validate();
    if (static_cast<std::size_t>(data.cols()) != params.J())
        throw InvalidArgument("responses have " + std::to_string(data.cols()) +
                              " items, model has " + std::to_string(params.J()));
    const Matrix post = hidden_probs(params, data.cast<double>());
    return (post.array() >= threshold).cast<std::uint8_t>();
}

Vector acc(const AttributeMatrix& a_hat, const AttributeMatrix& a_true)
{
    if (a_hat.rows() != a_true.rows() || a_hat.cols() != a_true.cols())
        throw InvalidArgument("acc: attribute matrices have different shapes");
    if (a_true.rows() == 0)
        throw InvalidArgument("acc: no subjects");
    const auto perm = hungarian_match(a_hat, a_true);
    const BinaryMatrix aligned = permute_columns(a_hat, perm);
    const auto n = static_cast<double>(a_true.rows());
    Vector out(a_true.cols());
    for (Eigen::Index k = 0; k < a_true.cols(); ++k)
        out[k] = static_cast<double>((aligned.col(k).array() == a_true.col(k).array()).count()) / n;
    return out;
}

} // namespace qrbm
