#include "assembly.hpp"

#include "parallel.hpp"
#include "quadrature.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <vector>

namespace hreig {

namespace {

struct ElementBlocks {
    Eigen::MatrixXd compliance;
    Eigen::MatrixXd divergence;
    Eigen::MatrixXd mass;
    Eigen::VectorXd trace;
};

double frobenius(const Sym2& a, const Sym2& b) { return (a.array() * b.array()).sum(); }

ElementBlocks element_blocks(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                             const TriangleRule& rule, int t) {
    const auto s = eval_stress(sspace, t, rule.points);
    const auto d = eval_displacement(uspace, t, rule.points);
    const double area = sspace.mesh().area(t);
    const int ns = s.nbasis;
    const int nu = d.nbasis;

    ElementBlocks out;
    out.compliance = Eigen::MatrixXd::Zero(ns, ns);
    out.divergence = Eigen::MatrixXd::Zero(nu, ns);
    out.mass = Eigen::MatrixXd::Zero(nu, nu);
    out.trace = Eigen::VectorXd::Zero(ns);

    std::vector<Sym2> a_phi(ns);
    for (int q = 0; q < s.npoints; ++q) {
        const double w = rule.weights[q] * area;
        for (int i = 0; i < ns; ++i) a_phi[i] = model.apply(s.value[q * ns + i]);
        for (int j = 0; j < ns; ++j) {
            const Sym2& phij = s.value[q * ns + j];
            out.trace(j) += w * phij.trace();
            for (int i = 0; i <= j; ++i) out.compliance(i, j) += w * frobenius(a_phi[i], phij);
        }
        for (int j = 0; j < ns; ++j) {
            const Eigen::Vector2d& divj = s.div[q * ns + j];
            for (int a = 0; a < nu; ++a) out.divergence(a, j) += w * d.value[q * nu + a].dot(divj);
        }
        for (int b = 0; b < nu; ++b)
            for (int a = 0; a <= b; ++a) out.mass(a, b) += w * d.value[q * nu + a].dot(d.value[q * nu + b]);
    }
    out.compliance.triangularView<Eigen::StrictlyLower>() = out.compliance.transpose();
    out.mass.triangularView<Eigen::StrictlyLower>() = out.mass.transpose();
    return out;
}

}  // namespace

BlockSystem assemble(const StressSpace& sspace, const DisplacementSpace& uspace, const ComplianceModel& model,
                     const AssemblyOptions& options) {
    const Mesh& mesh = sspace.mesh();
    if (&mesh != &uspace.mesh()) fail(ErrorKind::InvalidArgument, "stress and displacement spaces live on different meshes");
    const int k = sspace.degree();
    const int degree = options.quadrature_degree < 0 ? 2 * k : options.quadrature_degree;
    if (degree < 2 * k)
        fail(ErrorKind::Config, "quadrature degree " + std::to_string(degree) + " is below 2k = " + std::to_string(2 * k));
    const TriangleRule rule = triangle_rule(degree);

    const int nt = mesh.num_triangles();
    std::vector<ElementBlocks> blocks(nt);
    parallel_for(nt, options.threads, [&](int t) { blocks[t] = element_blocks(sspace, uspace, model, rule, t); });

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> ta, tb, tm;
    const int ns = sspace.local_size();
    const int nu = uspace.local_size();
    ta.reserve(static_cast<std::size_t>(nt) * ns * ns);
    tb.reserve(static_cast<std::size_t>(nt) * nu * ns);
    tm.reserve(static_cast<std::size_t>(nt) * nu * nu);
    Eigen::VectorXd trace = Eigen::VectorXd::Zero(sspace.dim());

    for (int t = 0; t < nt; ++t) {
        const auto local = sspace.local(t);
        const int uoff = uspace.offset(t);
        const ElementBlocks& b = blocks[t];
        for (int j = 0; j < ns; ++j) {
            const int gj = local[j].dof;
            trace(gj) += b.trace(j);
            for (int i = 0; i < ns; ++i)
                if (b.compliance(i, j) != 0.0) ta.emplace_back(local[i].dof, gj, b.compliance(i, j));
            for (int a = 0; a < nu; ++a)
                if (b.divergence(a, j) != 0.0) tb.emplace_back(uoff + a, gj, b.divergence(a, j));
        }
        for (int bb = 0; bb < nu; ++bb)
            for (int a = 0; a < nu; ++a)
                if (b.mass(a, bb) != 0.0) tm.emplace_back(uoff + a, uoff + bb, b.mass(a, bb));
    }

    BlockSystem sys;
    sys.compliance.resize(sspace.dim(), sspace.dim());
    sys.compliance.setFromTriplets(ta.begin(), ta.end());
    SparseMatrix transposed = sys.compliance.transpose();
    sys.compliance = 0.5 * (sys.compliance + transposed);
    sys.compliance.makeCompressed();
    sys.divergence.resize(uspace.dim(), sspace.dim());
    sys.divergence.setFromTriplets(tb.begin(), tb.end());
    sys.mass.resize(uspace.dim(), uspace.dim());
    sys.mass.setFromTriplets(tm.begin(), tm.end());
    if (model.kind() == ComplianceModel::Kind::Stokes) sys.trace = std::move(trace);
    return sys;
}

Eigen::MatrixXd local_mass(const DisplacementSpace& space, int element) {
    const TriangleRule rule = triangle_rule(2 * space.poly_degree());
    const auto d = eval_displacement(space, element, rule.points);
    const double area = space.mesh().area(element);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d.nbasis, d.nbasis);
    for (int q = 0; q < d.npoints; ++q)
        for (int b = 0; b < d.nbasis; ++b)
            for (int a = 0; a < d.nbasis; ++a)
                m(a, b) += rule.weights[q] * area * d.value[q * d.nbasis + a].dot(d.value[q * d.nbasis + b]);
    return m;
}

Eigen::VectorXd l2_project(const DisplacementSpace& space, const PiecewiseVectorField& f, int quadrature_degree) {
    const Mesh& mesh = space.mesh();
    const int degree = quadrature_degree < 0 ? 2 * space.poly_degree() + 4 : quadrature_degree;
    const TriangleRule rule = triangle_rule(degree);
    Eigen::VectorXd out(space.dim());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto d = eval_displacement(space, t, rule.points);
        const double area = mesh.area(t);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d.nbasis);
        for (int q = 0; q < d.npoints; ++q) {
            const Eigen::Vector2d fx = f(t, mesh.point(t, rule.points[q]));
            for (int a = 0; a < d.nbasis; ++a) rhs(a) += rule.weights[q] * area * d.value[q * d.nbasis + a].dot(fx);
        }
        out.segment(space.offset(t), d.nbasis) = local_mass(space, t).ldlt().solve(rhs);
    }
    return out;
}

void write_matrix_market(const BlockSystem& system, const std::string& prefix) {
    const auto save = [](const SparseMatrix& m, const std::string& path) {
        if (!Eigen::saveMarket(m, path)) fail(ErrorKind::Io, "cannot write " + path);
    };
    save(system.compliance, prefix + "_compliance.mtx");
    save(system.divergence, prefix + "_divergence.mtx");
    save(system.mass, prefix + "_mass.mtx");
}

}  // namespace hreig
