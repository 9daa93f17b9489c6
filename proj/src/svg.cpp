#include "besic/svg.hpp"

#include <cstdio>
#include <sstream>

#include "besic/error.hpp"

namespace besic {

namespace {

std::string num(Real v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12Lf", v);
    return buf;
}

std::string pt(Point p) { return num(px(p)) + "," + num(py(p)); }

class Doc {
public:
    explicit Doc(const std::string& title)
    {
        os_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" "
            << "viewBox=\"-0.05 -0.05 1.1 1.1\">\n"
            << "<title>" << title << "</title>\n"
            << "<rect x=\"-0.05\" y=\"-0.05\" width=\"1.1\" height=\"1.1\" fill=\"white\"/>\n"
            << "<g id=\"plane\" transform=\"matrix(1 0 0 -1 0 1)\">\n";
    }

    void open(const char* layer, const char* style) { os_ << "<g id=\"" << layer << "\" " << style << ">\n"; }
    void close() { os_ << "</g>\n"; }

    void rect(const RectNode& r)
    {
        os_ << "<rect x=\"" << num(r.left()) << "\" y=\"" << num(r.bottom()) << "\" width=\"" << num(r.width)
            << "\" height=\"" << num(r.height) << "\"/>\n";
    }

    void polygon(const std::array<Point, 4>& c)
    {
        os_ << "<polygon points=\"" << pt(c[0]) << ' ' << pt(c[1]) << ' ' << pt(c[2]) << ' ' << pt(c[3]) << "\"/>\n";
    }

    void polyline(const std::vector<Point>& p)
    {
        os_ << "<polyline points=\"";
        for (std::size_t i = 0; i < p.size(); ++i) os_ << (i ? " " : "") << pt(p[i]);
        os_ << "\"/>\n";
    }

    void dot(Point p, Real r) { os_ << "<circle cx=\"" << num(px(p)) << "\" cy=\"" << num(py(p)) << "\" r=\"" << num(r) << "\"/>\n"; }

    // Labels live outside the flipped group so the text stays upright.
    void label(Point p, const std::string& text) { labels_.emplace_back(p, text); }

    std::string finish()
    {
        os_ << "</g>\n<g id=\"labels\" font-family=\"sans-serif\" font-size=\"0.025\" fill=\"black\">\n";
        for (const auto& [p, t] : labels_)
            os_ << "<text x=\"" << num(px(p)) << "\" y=\"" << num(1 - py(p)) << "\">" << t << "</text>\n";
        os_ << "</g>\n</svg>\n";
        return os_.str();
    }

private:
    std::ostringstream os_;
    std::vector<std::pair<Point, std::string>> labels_;
};

void check_cap(std::size_t n, std::size_t cap, const std::string& what)
{
    if (n > cap)
        throw ResourceCapError(what + " has " + std::to_string(n) + " elements, above the render cap " +
                               std::to_string(cap) + "; render a sampled subset instead");
}

std::vector<Point> arc_samples(const ArcSolution& sol, Real end_angle, int count)
{
    std::vector<Point> out;
    for (int i = 0; i <= count; ++i) out.push_back(sol.center * one_minus_cis_neg(end_angle * i / count));
    return out;
}

// Angle at the center from the origin to (delta, Delta).
Real chord_angle(const ArcSolution& sol)
{
    const Point a = -sol.center;
    const Point b = Point{sol.delta, sol.Delta} - sol.center;
    return std::abs(std::arg(b / a));
}

} // namespace

RenderTarget parse_render_target(const std::string& t)
{
    if (t == "arc_diagram") return RenderTarget::arc_diagram;
    if (t == "level_set") return RenderTarget::level_set;
    if (t == "tube_stage") return RenderTarget::tube_stage;
    if (t == "gamma_theta") return RenderTarget::gamma_theta;
    throw ConfigError("unknown render target '" + t + "'");
}

const char* to_string(RenderTarget t)
{
    switch (t) {
    case RenderTarget::arc_diagram: return "arc_diagram";
    case RenderTarget::level_set: return "level_set";
    case RenderTarget::tube_stage: return "tube_stage";
    case RenderTarget::gamma_theta: return "gamma_theta";
    }
    return "?";
}

std::string render_svg(const TranslationField& v, RenderTarget target, const RenderParams& prm)
{
    const Hierarchy& h = v.hierarchy();
    const int n = prm.level;
    const Real stroke = 0.002L;
    switch (target) {
    case RenderTarget::arc_diagram: {
        const ArcSolution& sol = h.arc(n);
        Doc d("arc diagram, level " + std::to_string(n));
        d.open("rectangles", ("fill=\"none\" stroke=\"black\" stroke-width=\"" + num(stroke) + "\"").c_str());
        RectNode q;
        q.width = sol.delta;
        q.height = sol.Delta;
        d.rect(q);
        d.close();
        d.open("arc", ("fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"" + num(stroke) + "\"").c_str());
        d.polyline(arc_samples(sol, chord_angle(sol), 512));
        d.close();
        d.open("anchors", "fill=\"#c0392b\"");
        d.dot({0, 0}, 0.006L);
        d.dot(sol.q, 0.006L);
        d.dot({sol.delta, sol.Delta}, 0.006L);
        d.close();
        d.label(sol.q, "q");
        d.label({sol.delta, sol.Delta}, "(delta, Delta)");
        return d.finish();
    }
    case RenderTarget::level_set: {
        const LevelSet& lv = h.level(n);
        check_cap(lv.size(), prm.cap, "level " + std::to_string(n));
        Doc d("level set " + std::to_string(n));
        d.open("rectangles", "fill=\"#1f5fbf\" fill-opacity=\"0.35\" stroke=\"#1f5fbf\" stroke-width=\"0.0005\"");
        for (const RectNode& r : lv.rects) d.rect(r);
        d.close();
        if (n >= 2) {
            const ArcSolution& sol = h.arc(n - 1);
            d.open("arc", "fill=\"none\" stroke=\"#888888\" stroke-width=\"0.001\"");
            d.polyline(arc_samples(sol, chord_angle(sol), 512));
            d.close();
        }
        d.open("anchors", "fill=\"#c0392b\"");
        for (const RectNode& r : lv.rects) d.dot(r.anchor, 0.002L);
        d.close();
        return d.finish();
    }
    case RenderTarget::tube_stage: {
        const auto stage = besicovitch_stage(v, n, prm.C, prm.cap);
        std::size_t total = 0;
        for (const auto& f : stage) total += f.tubes.size();
        check_cap(total, prm.cap, "tube stage " + std::to_string(n));
        Doc d("tube stage " + std::to_string(n));
        d.open("rectangles", "fill=\"#e67e22\" fill-opacity=\"0.08\" stroke=\"#e67e22\" stroke-width=\"0.001\"");
        for (const auto& f : stage)
            for (const RotatedBox& b : f.tubes) d.polygon(b.corners());
        d.close();
        d.open("anchors", "fill=\"#c0392b\"");
        for (const auto& f : stage)
            for (const RotatedBox& b : f.tubes) d.dot(b.center, 0.002L);
        d.close();
        return d.finish();
    }
    case RenderTarget::gamma_theta: {
        const LevelSet& lv = h.level(n);
        check_cap(lv.size(), prm.cap, "level " + std::to_string(n));
        const Point vt = v.limit(prm.theta, std::numeric_limits<Real>::min()).v;
        Doc d("gamma_theta, level " + std::to_string(n));
        d.open("rectangles", "fill=\"#27ae60\" fill-opacity=\"0.35\" stroke=\"#27ae60\" stroke-width=\"0.0005\"");
        for (const RectNode& r : lv.rects) {
            RotatedBox b{r.anchor + Point{r.width / 2, r.height / 2}, 0, r.width / 2, r.height / 2};
            std::array<Point, 4> c = b.corners();
            for (Point& p : c) p = rotate(p, prm.theta) + vt;
            d.polygon(c);
        }
        d.close();
        d.open("anchors", "fill=\"#c0392b\"");
        for (const Point p : gamma_theta_anchors(lv, prm.theta, vt)) d.dot(p, 0.002L);
        d.close();
        return d.finish();
    }
    }
    throw ConfigError("unknown render target");
}

} // namespace besic
