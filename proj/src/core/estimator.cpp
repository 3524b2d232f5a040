#include "estimator.hpp"

#include "parallel.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace hreig {

namespace {

struct EdgeIntegrals {
    double j1 = 0.0;  // |J1|^2
    double j2 = 0.0;  // |J2|^2
    double u = 0.0;   // |[u]|^2
};

struct TraceValue {
    Sym2 a_sigma;
    Sym2 a_dx;
    Sym2 a_dy;
    Eigen::Vector2d u;
};

TraceValue trace_at(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                    const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, int t, const Point& x) {
    const Eigen::Vector3d bary = sspace.mesh().barycentric(t, x);
    const StressJet s = stress_jet(sspace, sigma, t, bary);
    return {model.apply(s.value), model.apply(s.dx), model.apply(s.dy), displacement_jet(uspace, u, t, bary).value};
}

EdgeIntegrals edge_integrals(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                             const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, const LineRule& rule, int e) {
    const Mesh& mesh = sspace.mesh();
    const Edge& edge = mesh.edge(e);
    const Point a = mesh.vertex(edge.v[0]);
    const Point b = mesh.vertex(edge.v[1]);
    const Point t = mesh.edge_tangent(e);
    const Point nu = mesh.edge_normal(e);
    const double len = mesh.edge_length(e);
    EdgeIntegrals out;
    for (int q = 0; q < rule.size(); ++q) {
        const Point x = a + rule.points[q] * (b - a);
        const double w = rule.weights[q] * len;
        const TraceValue p = trace_at(sspace, uspace, model, sigma, u, edge.tri[0], x);
        double j1 = t.dot(p.a_sigma * t);
        double j2 = curl(p.a_dx, p.a_dy).dot(t);
        Eigen::Vector2d ju = p.u;
        if (edge.boundary()) {
            const Sym2 dt = t(0) * p.a_dx + t(1) * p.a_dy;
            j2 += t.dot(dt * nu);
        } else {
            const TraceValue m = trace_at(sspace, uspace, model, sigma, u, edge.tri[1], x);
            j1 -= t.dot(m.a_sigma * t);
            j2 -= curl(m.a_dx, m.a_dy).dot(t);
            ju -= m.u;
        }
        out.j1 += w * j1 * j1;
        out.j2 += w * j2 * j2;
        out.u += w * ju.squaredNorm();
    }
    return out;
}

ElementIndicator volume_terms(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                              const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, const TriangleRule& rule, int t) {
    const Mesh& mesh = sspace.mesh();
    const double area = mesh.area(t);
    const double h2 = area;  // h_K = |K|^{1/2}
    ElementIndicator out;
    out.element = t;
    for (int q = 0; q < rule.size(); ++q) {
        const double w = rule.weights[q] * area;
        const StressJet s = stress_jet(sspace, sigma, t, rule.points[q]);
        const double cc = curl_curl(model.apply(s.dxx), model.apply(s.dxy), model.apply(s.dyy));
        const Sym2 r = model.apply(s.value) - displacement_jet(uspace, u, t, rule.points[q]).sym_grad();
        out.curlcurl += w * cc * cc;
        out.sym += w * r.squaredNorm();
    }
    out.curlcurl *= h2 * h2;
    out.sym *= h2;
    return out;
}

void add_edge_terms(ElementIndicator& ind, const Mesh& mesh, const std::vector<EdgeIntegrals>& edges,
                    const std::array<int, 3>& edge_ids) {
    const double h = std::sqrt(mesh.area(ind.element));
    for (int e : edge_ids) {
        const EdgeIntegrals& ei = edges[e];
        ind.edge += h * ei.j1 + h * h * h * ei.j2;
        ind.jump += h * ei.u;
    }
}

void check_sizes(const StressSpace& sspace, const DisplacementSpace& uspace, const Eigen::VectorXd& sigma,
                 const Eigen::VectorXd& u) {
    if (&sspace.mesh() != &uspace.mesh()) fail(ErrorKind::InvalidArgument, "estimator: spaces live on different meshes");
    if (sigma.size() != sspace.dim() || u.size() != uspace.dim())
        fail(ErrorKind::InvalidArgument, "estimator: coefficient size mismatch");
}

}  // namespace

Eigen::Vector2d curl(const Sym2& dx, const Sym2& dy) {
    return {dx(0, 1) - dy(0, 0), dx(1, 1) - dy(1, 0)};
}

double curl_curl(const Sym2& dxx, const Sym2& dxy, const Sym2& dyy) {
    return dyy(0, 0) - 2.0 * dxy(0, 1) + dxx(1, 1);
}

std::vector<double> EstimatorReport::totals() const {
    std::vector<double> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.push_back(e.total());
    return out;
}

std::vector<double> StarReport::totals() const {
    std::vector<double> out;
    out.reserve(elements.size());
    for (const auto& e : elements) out.push_back(e.total());
    return out;
}

EstimatorReport eta_local_all(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                              const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, int threads) {
    check_sizes(sspace, uspace, sigma, u);
    const Mesh& mesh = sspace.mesh();
    const int k = sspace.degree();
    const LineRule lrule = line_rule(2 * k);
    const TriangleRule trule = triangle_rule(2 * k);

    std::vector<EdgeIntegrals> edges(mesh.num_edges());
    parallel_for(mesh.num_edges(), threads,
                 [&](int e) { edges[e] = edge_integrals(sspace, uspace, model, sigma, u, lrule, e); });

    EstimatorReport report;
    report.elements.resize(mesh.num_triangles());
    parallel_for(mesh.num_triangles(), threads, [&](int t) {
        ElementIndicator ind = volume_terms(sspace, uspace, model, sigma, u, trule, t);
        add_edge_terms(ind, mesh, edges, {mesh.edge_of(t, 0), mesh.edge_of(t, 1), mesh.edge_of(t, 2)});
        report.elements[t] = ind;
    });
    return report;
}

ElementIndicator eta_local(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                           const Eigen::VectorXd& sigma, const Eigen::VectorXd& u, int element) {
    check_sizes(sspace, uspace, sigma, u);
    const Mesh& mesh = sspace.mesh();
    if (element < 0 || element >= mesh.num_triangles()) fail(ErrorKind::InvalidArgument, "estimator: no such element");
    const int k = sspace.degree();
    const LineRule lrule = line_rule(2 * k);
    ElementIndicator ind = volume_terms(sspace, uspace, model, sigma, u, triangle_rule(2 * k), element);
    std::vector<EdgeIntegrals> edges(mesh.num_edges());
    std::array<int, 3> ids{};
    for (int i = 0; i < 3; ++i) {
        ids[i] = mesh.edge_of(element, i);
        edges[ids[i]] = edge_integrals(sspace, uspace, model, sigma, u, lrule, ids[i]);
    }
    add_edge_terms(ind, mesh, edges, ids);
    return ind;
}

double eta_global(const EstimatorReport& report) {
    double sum = 0.0;
    for (const auto& e : report.elements) sum += e.total();
    return sum;
}

double eta_subset(const EstimatorReport& report, std::span<const int> elements) {
    double sum = 0.0;
    for (int t : elements) {
        if (t < 0 || t >= static_cast<int>(report.elements.size()))
            fail(ErrorKind::InvalidArgument, "eta_subset: unknown element " + std::to_string(t));
        sum += report.elements[t].total();
    }
    return sum;
}

StarReport eta_star(const StressSpace& sspace, const ComplianceModel& model, const Eigen::VectorXd& sigma,
                    const ReconstructedField& ustar, double lambda_star, int threads) {
    const Mesh& mesh = sspace.mesh();
    const int m = ustar.degree();
    const int degree = 2 * std::max(m, sspace.degree());
    const TriangleRule trule = triangle_rule(degree);
    const LineRule lrule = line_rule(degree);

    std::vector<double> edge_jump(mesh.num_edges(), 0.0);
    parallel_for(mesh.num_edges(), threads, [&](int e) {
        const Edge& edge = mesh.edge(e);
        const Point a = mesh.vertex(edge.v[0]);
        const Point b = mesh.vertex(edge.v[1]);
        const double len = mesh.edge_length(e);
        double sum = 0.0;
        for (int q = 0; q < lrule.size(); ++q) {
            const Point x = a + lrule.points[q] * (b - a);
            Eigen::Vector2d j = ustar.jet(edge.tri[0], mesh.barycentric(edge.tri[0], x)).value;
            if (!edge.boundary()) j -= ustar.jet(edge.tri[1], mesh.barycentric(edge.tri[1], x)).value;
            sum += lrule.weights[q] * len * j.squaredNorm();
        }
        edge_jump[e] = sum / len;
    });

    StarReport report;
    report.elements.resize(mesh.num_triangles());
    parallel_for(mesh.num_triangles(), threads, [&](int t) {
        StarIndicator ind;
        ind.element = t;
        const double area = mesh.area(t);
        for (int q = 0; q < trule.size(); ++q) {
            const double w = trule.weights[q] * area;
            const StressJet s = stress_jet(sspace, sigma, t, trule.points[q]);
            const DisplacementJet us = ustar.jet(t, trule.points[q]);
            ind.sym += w * (model.apply(s.value) - us.sym_grad()).squaredNorm();
            ind.residual += w * (lambda_star * us.value + s.div()).squaredNorm();
        }
        ind.residual *= area;
        for (int i = 0; i < 3; ++i) {
            const int e = mesh.edge_of(t, i);
            ind.jump += mesh.edge(e).boundary() ? edge_jump[e] : 0.5 * edge_jump[e];
        }
        report.elements[t] = ind;
    });
    return report;
}

double eta_star_global(const StarReport& report) {
    double sum = 0.0;
    for (const auto& e : report.elements) sum += e.total();
    return sum;
}

void write_estimator_csv(const EstimatorReport& report, std::ostream& out) {
    out << "element,curlcurl,edge,sym,jump,total\n";
    out << std::setprecision(12);
    for (const auto& e : report.elements)
        out << e.element << ',' << e.curlcurl << ',' << e.edge << ',' << e.sym << ',' << e.jump << ',' << e.total()
            << '\n';
}

}  // namespace hreig
