#include "cspq/probability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace cspq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

BigRational sum_outer_areas(const RegionSet& g) {
    BigRational acc;
    for (const auto& part : g.parts) acc += part.outer.area_exact();
    acc.canonicalize();
    return acc;
}

std::vector<BigRational> holes_descending(const RegionSet& g) {
    std::vector<BigRational> holes;
    for (const auto& part : g.parts)
        for (const auto& h : part.holes) holes.push_back(h.area_exact());
    std::sort(holes.begin(), holes.end(),
              [](const BigRational& a, const BigRational& b) { return b < a; });
    return holes;
}

// num/den < thr  (den > 0)
bool ratio_below(const BigRational& num, const BigRational& den, const BigRational& thr) {
    return (num / den) < thr;
}

// num/den > thr
bool ratio_above(const BigRational& num, const BigRational& den, const BigRational& thr) {
    return thr < (num / den);
}

// Double rings prepared for fast containment during sampling.
struct PreparedRegion {
    struct Part {
        std::vector<std::vector<Point>> rings;  // outer first, then holes
        Mbr box;
    };
    std::vector<Part> parts;

    explicit PreparedRegion(const RegionSet& g) {
        parts.reserve(g.parts.size());
        for (const auto& part : g.parts) {
            Part p;
            p.box = part.mbr();
            p.rings.push_back(part.outer.points());
            for (const auto& h : part.holes) p.rings.push_back(h.points());
            parts.push_back(std::move(p));
        }
    }

    [[nodiscard]] bool contains(double x, double y) const noexcept {
        for (const auto& part : parts) {
            if (x < part.box.min.x || x > part.box.max.x || y < part.box.min.y ||
                y > part.box.max.y)
                continue;
            bool inside = false;
            for (const auto& ring : part.rings) {
                const std::size_t n = ring.size();
                for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                    if ((ring[i].y > y) != (ring[j].y > y)) {
                        const double xc = ring[i].x + (y - ring[i].y) * (ring[j].x - ring[i].x) /
                                                          (ring[j].y - ring[i].y);
                        if (x < xc) inside = !inside;
                    }
                }
            }
            if (inside) return true;
        }
        return false;
    }
};

// Rejection sampler over a region; the same instance drives every
// Monte Carlo estimator so that estimates sharing a seed share their
// point streams.
class RegionSampler {
public:
    RegionSampler(const RegionSet& u, Rng& rng)
        : prepared_(u), box_(u.mbr()), rng_(rng) {}

    Point next() {
        std::uniform_real_distribution<double> dx(box_.min.x, box_.max.x);
        std::uniform_real_distribution<double> dy(box_.min.y, box_.max.y);
        for (;;) {
            ++attempts_;
            const double x = dx(rng_);
            const double y = dy(rng_);
            if (prepared_.contains(x, y)) {
                ++accepted_;
                return {x, y};
            }
            if (attempts_ >= 20000 && accepted_ * 10000 < attempts_)
                throw geometry_error("degenerate region: rejection sampling efficiency below 1e-4");
        }
    }

private:
    PreparedRegion prepared_;
    Mbr box_;
    Rng& rng_;
    std::uint64_t attempts_ = 0;
    std::uint64_t accepted_ = 0;
};

struct McState {
    double total_weight = 0;
    double hits_weight = 0;
    std::size_t drawn = 0;

    void extend(RegionSampler& sampler, const PreparedRegion& s_prep, const Pdf& pdf,
                const MovingObject& o, std::size_t target) {
        while (drawn < target) {
            const Point p = sampler.next();
            const double f = pdf_density(pdf, o, p);
            total_weight += f;
            if (s_prep.contains(p.x, p.y)) hits_weight += f;
            ++drawn;
        }
    }

    [[nodiscard]] double value() const {
        if (total_weight <= 0) throw geometry_error("monte carlo estimate with zero total weight");
        return hits_weight / total_weight;
    }
};

std::size_t version_samples(const WorldConfig& cfg, int k) {
    return static_cast<std::size_t>((static_cast<long long>(k) * cfg.n1) / cfg.theta);
}

}  // namespace

Rng make_object_rng(std::uint64_t query_seed, ObjectId id) {
    return Rng(splitmix64(query_seed ^ splitmix64(0x5bd1e995u + id)));
}

BigRational exact_probability_uniform(const RegionSet& u, const RegionSet& s) {
    BigRational au = u.area_exact();
    if (au.sign() <= 0) throw geometry_error("degenerate object: zero-area uncertainty region");
    BigRational p = s.area_exact() / au;
    p.canonicalize();
    return p;
}

Decision uniform_multistep(const RegionSet& u, const RegionSet& s, double p_t,
                           std::vector<double>* trace) {
    BigRational au = u.area_exact();
    if (au.sign() <= 0) throw geometry_error("degenerate object: zero-area uncertainty region");
    const BigRational thr = BigRational::from_double(p_t);

    BigRational num = sum_outer_areas(s);
    const std::vector<BigRational> holes = holes_descending(s);

    int step = 1;
    for (std::size_t next_hole = 0;; ++step) {
        if (trace) trace->push_back((num / au).to_double());
        if (ratio_below(num, au, thr))
            return {Decision::Kind::Pruned, Rule::CvrPrune, 0.0, step, 0};
        if (next_hole >= holes.size()) break;
        num -= holes[next_hole++];
    }

    BigRational p = num / au;
    p.canonicalize();
    return {Decision::Kind::Exact, Rule::FinalExact, p.to_double(), step, 0};
}

Decision uniform_multistep_validate(const RegionSet& u, const RegionSet& s, double p_t,
                                    std::vector<double>* trace) {
    BigRational den = sum_outer_areas(u);
    if (den.sign() <= 0) throw geometry_error("degenerate object: zero-area uncertainty region");
    const BigRational thr = BigRational::from_double(p_t);
    const BigRational num = s.area_exact();
    const std::vector<BigRational> holes = holes_descending(u);

    int step = 1;
    for (std::size_t next_hole = 0; next_hole < holes.size(); ++next_hole, ++step) {
        if (trace) trace->push_back((num / den).to_double());
        if (ratio_above(num, den, thr))
            return {Decision::Kind::Validated, Rule::CvrValidate, 0.0, step, 0};
        den -= holes[next_hole];
    }

    // final step: den is now area(u), the ratio is the exact p
    BigRational p = num / den;
    p.canonicalize();
    const double pd = p.to_double();
    if (trace) trace->push_back(pd);
    if (!(p < thr)) return {Decision::Kind::Validated, Rule::FinalExact, pd, step, 0};
    return {Decision::Kind::Pruned, Rule::FinalExact, pd, step, 0};
}

double reference_value(const RegionSet& u, const RegionSet& s) {
    BigRational den = sum_outer_areas(u);
    if (den.sign() <= 0) throw geometry_error("degenerate object: zero-area uncertainty region");
    BigRational g = sum_outer_areas(s) / den;
    g.canonicalize();
    return g.to_double();
}

Decision adaptive_uniform(const RegionSet& u, const RegionSet& s, double p_t,
                          std::vector<double>* trace) {
    BigRational den = sum_outer_areas(u);
    if (den.sign() <= 0) throw geometry_error("degenerate object: zero-area uncertainty region");
    const BigRational gamma = sum_outer_areas(s) / den;
    Decision d;
    if (gamma < BigRational::from_double(p_t)) {
        d = uniform_multistep(u, s, p_t, trace);
        d.method = 1;
    } else {
        d = uniform_multistep_validate(u, s, p_t, trace);
        d.method = 2;
    }
    return d;
}

std::vector<Point> sample_in_region(const RegionSet& u, std::size_t n, Rng& rng) {
    if (u.empty() || !(u.area() > 0))
        throw geometry_error("cannot sample from an empty region");
    RegionSampler sampler(u, rng);
    std::vector<Point> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(sampler.next());
    return pts;
}

double mc_probability(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, std::size_t n, Rng& rng) {
    RegionSampler sampler(u, rng);
    PreparedRegion s_prep(s);
    McState mc;
    mc.extend(sampler, s_prep, pdf, o, n);
    return mc.value();
}

Decision mc_multistep(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, double p_t, const WorldConfig& cfg, Rng& rng,
                      std::vector<double>* trace) {
    RegionSampler sampler(u, rng);
    PreparedRegion s_prep(s);
    McState mc;
    for (int k = 1; k <= cfg.theta; ++k) {
        mc.extend(sampler, s_prep, pdf, o, version_samples(cfg, k));
        const double cvr = mc.value();
        if (trace) trace->push_back(cvr);
        const double delta = cfg.delta_table.delta[static_cast<std::size_t>(k - 1)];
        if (cvr + delta < p_t) return {Decision::Kind::Pruned, Rule::McPrune, cvr, k, 0};
    }
    return {Decision::Kind::Exact, Rule::FinalEstimate, mc.value(), cfg.theta, 0};
}

Decision two_way_test(const RegionSet& u, const RegionSet& s, const Pdf& pdf,
                      const MovingObject& o, double p_t, const WorldConfig& cfg, Rng& rng,
                      std::vector<double>* trace) {
    RegionSampler sampler(u, rng);
    PreparedRegion s_prep(s);
    McState mc;
    for (int k = 1; k <= cfg.theta; ++k) {
        mc.extend(sampler, s_prep, pdf, o, version_samples(cfg, k));
        const double cvr = mc.value();
        if (trace) trace->push_back(cvr);
        const double delta = cfg.delta_table.delta[static_cast<std::size_t>(k - 1)];
        if (cvr + delta < p_t) return {Decision::Kind::Pruned, Rule::McPrune, cvr, k, 0};
        if (cvr - delta >= p_t) return {Decision::Kind::Validated, Rule::McValidate, cvr, k, 0};
    }
    // the final CVR equals the full-sample estimate: take the object as qualified
    return {Decision::Kind::Validated, Rule::FinalEstimate, mc.value(), cfg.theta, 0};
}

DeltaTable calibrate_delta_table(const WorldConfig& cfg, std::span<const WorkloadInstance> workload,
                                 std::uint64_t seed, std::size_t oracle_n) {
    if (workload.empty()) throw validation_error("calibration workload is empty");
    const std::size_t theta = static_cast<std::size_t>(cfg.theta);
    std::vector<double> max_err(theta, 0.0);
    double final_err_sum = 0;

    for (const auto& inst : workload) {
        Rng oracle_rng = make_object_rng(seed ^ 0x0a0a0a0a0a0a0a0aULL, inst.object.id);
        const double oracle =
            mc_probability(inst.u, inst.s, inst.object.pdf, inst.object, oracle_n, oracle_rng);

        Rng rng = make_object_rng(seed, inst.object.id);
        RegionSampler sampler(inst.u, rng);
        PreparedRegion s_prep(inst.s);
        McState mc;
        for (std::size_t k = 1; k <= theta; ++k) {
            mc.extend(sampler, s_prep, inst.object.pdf, inst.object,
                      version_samples(cfg, static_cast<int>(k)));
            const double err = std::abs(mc.value() - oracle);
            max_err[k - 1] = std::max(max_err[k - 1], err);
            if (k == theta) final_err_sum += err;
        }
    }

    DeltaTable t;
    t.samples.resize(theta);
    t.delta.resize(theta);
    for (std::size_t k = 0; k < theta; ++k) {
        t.samples[k] = static_cast<int>(version_samples(cfg, static_cast<int>(k) + 1));
        t.delta[k] = max_err[k];
    }
    t.delta[theta - 1] = final_err_sum / static_cast<double>(workload.size());
    // a bound may only be raised: enforce nonincreasing by backward maximum
    for (std::size_t k = theta - 1; k-- > 0;)
        t.delta[k] = std::max(t.delta[k], t.delta[k + 1]);
    return t;
}

void save_delta_table(const DeltaTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << "version,samples,delta\n";
    char buf[64];
    for (std::size_t k = 0; k < table.delta.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", k + 1, table.samples[k], table.delta[k]);
        out << buf;
    }
}

DeltaTable load_delta_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open " + path.string());
    DeltaTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("version", 0) == 0) continue;
        unsigned version = 0;
        int samples = 0;
        double delta = 0;
        if (std::sscanf(line.c_str(), "%u,%d,%lf", &version, &samples, &delta) != 3)
            throw validation_error(path.string() + ":" + std::to_string(lineno) +
                                   ": expected version,samples,delta");
        t.samples.push_back(samples);
        t.delta.push_back(delta);
    }
    if (t.delta.empty()) throw validation_error(path.string() + ": empty delta table");
    return t;
}

}  // namespace cspq
