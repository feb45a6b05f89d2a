#include "cspq/model.hpp"

#include <cmath>

namespace cspq {

DeltaTable default_delta_table() {
    DeltaTable t;
    t.samples = {100, 200, 300, 400, 500, 600, 700};
    t.delta = {0.3607, 0.2499, 0.2131, 0.1921, 0.1504, 0.1067, 0.0095};
    return t;
}

void WorldConfig::validate() const {
    if (!(width > 0)) throw geometry_error("world width must be positive");
    if (theta < 1) throw geometry_error("theta must be at least 1");
    if (n1 < theta) throw geometry_error("N1 must be at least theta");
    if (circle_vertices < 3) throw geometry_error("circle_vertices must be at least 3");
    if (delta_table.delta.size() != static_cast<std::size_t>(theta))
        throw geometry_error("delta table must have theta entries");
    for (std::size_t k = 1; k < delta_table.delta.size(); ++k)
        if (delta_table.delta[k] > delta_table.delta[k - 1])
            throw geometry_error("delta table must be nonincreasing");
}

double pdf_density(const Pdf& pdf, const MovingObject& o, const Point& p) {
    switch (pdf.kind) {
        case PdfKind::Uniform:
            return 1.0;
        case PdfKind::DistortedGaussian: {
            const double sigma = pdf.sigma > 0 ? pdf.sigma : o.tau / 5.0;
            const double dx = p.x - o.l_r.x;
            const double dy = p.y - o.l_r.y;
            return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
    return 0.0;
}

}  // namespace cspq
