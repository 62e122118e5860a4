#ifndef ZIC_ENVELOPE_HPP
#define ZIC_ENVELOPE_HPP

#include <vector>

namespace zic {

struct EnvelopePoint {
    double x = 0.0;
    double y = 0.0;
    double f = 0.0;
};

struct SupportPoint {
    double x = 0.0;
    double y = 0.0;
    double f = 0.0;
    double weight = 0.0;
    int index = -1;  // into the input list, -1 for the query column or a probe point
};

struct EnvelopeResult {
    double value = 0.0;
    std::vector<SupportPoint> support;  // at most 3 with positive weight
    int pivots = 0;
};

// Upper concave envelope of the sampled points at query.(x, y):
// max sum w_i f_i  s.t.  sum w_i = 1, sum w_i x_i = qx, sum w_i y_i = qy, w >= 0.
// The query itself enters as a column, so the result is never below query.f.
// If every sample shares query.y the y row is dropped (1-D envelope).
EnvelopeResult concave_envelope_at(const std::vector<EnvelopePoint>& pts, const EnvelopePoint& query);

}  // namespace zic

#endif
