#include "lagrange.hpp"

#include "error.hpp"

namespace hreig {

namespace {

// Univariate factor prod_{j<a} (n s - j)/(j+1) with first and second derivatives.
struct Factor {
    double f, d1, d2;
};

Factor factor(int n, int a, double s) {
    Factor r{1.0, 0.0, 0.0};
    for (int j = 0; j < a; ++j) {
        const double g = (n * s - j) / (j + 1);
        const double dg = static_cast<double>(n) / (j + 1);
        r.d2 = r.d2 * g + 2.0 * r.d1 * dg;
        r.d1 = r.d1 * g + r.f * dg;
        r.f *= g;
    }
    return r;
}

}  // namespace

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
    if (degree < 0) fail(ErrorKind::InvalidArgument, "LagrangeBasis: negative degree");
    // Ordering: vertices, then edge nodes edge by edge, then interior nodes.
    if (degree == 0) {
        nodes_.push_back({{0, 0, 0}, NodeKind::Interior, -1});
        return;
    }
    for (int v = 0; v < 3; ++v) {
        std::array<int, 3> idx{0, 0, 0};
        idx[v] = degree;
        nodes_.push_back({idx, NodeKind::Vertex, v});
    }
    for (int e = 0; e < 3; ++e) {
        const int a = (e + 1) % 3;
        const int b = (e + 2) % 3;
        for (int j = 1; j < degree; ++j) {
            std::array<int, 3> idx{0, 0, 0};
            idx[a] = degree - j;
            idx[b] = j;
            nodes_.push_back({idx, NodeKind::Edge, e});
        }
    }
    for (int i = 1; i < degree; ++i) {
        for (int j = 1; i + j < degree; ++j) {
            nodes_.push_back({{degree - i - j, i, j}, NodeKind::Interior, -1});
        }
    }
}

Eigen::Vector3d LagrangeBasis::node_barycentric(int a) const {
    const auto& idx = nodes_[a].index;
    if (degree_ == 0) return Eigen::Vector3d::Constant(1.0 / 3.0);
    return Eigen::Vector3d(idx[0], idx[1], idx[2]) / degree_;
}

int LagrangeBasis::find(const std::array<int, 3>& index) const {
    for (int a = 0; a < size(); ++a) {
        if (nodes_[a].index == index) return a;
    }
    return -1;
}

void LagrangeBasis::values(const Eigen::Vector3d& bary, Eigen::Ref<Eigen::VectorXd> out) const {
    for (int a = 0; a < size(); ++a) {
        const auto& idx = nodes_[a].index;
        out(a) = factor(degree_, idx[0], bary(0)).f * factor(degree_, idx[1], bary(1)).f *
                 factor(degree_, idx[2], bary(2)).f;
    }
}

void LagrangeBasis::jets(const Eigen::Vector3d& bary, const Eigen::Matrix<double, 3, 2>& grad_bary,
                         std::vector<ScalarJet>& out) const {
    out.resize(nodes_.size());
    for (int a = 0; a < size(); ++a) {
        const auto& idx = nodes_[a].index;
        const std::array<Factor, 3> F{factor(degree_, idx[0], bary(0)), factor(degree_, idx[1], bary(1)),
                                      factor(degree_, idx[2], bary(2))};
        ScalarJet& jet = out[a];
        jet.value = F[0].f * F[1].f * F[2].f;
        jet.grad.setZero();
        jet.hess.setZero();
        for (int i = 0; i < 3; ++i) {
            const int p = (i + 1) % 3;
            const int q = (i + 2) % 3;
            const double others = F[p].f * F[q].f;
            const Eigen::Vector2d gi = grad_bary.row(i).transpose();
            jet.grad += F[i].d1 * others * gi;
            jet.hess += F[i].d2 * others * Eigen::Vector3d(gi(0) * gi(0), gi(0) * gi(1), gi(1) * gi(1));
            for (int j = 0; j < 3; ++j) {
                if (j == i) continue;
                const int r = 3 - i - j;
                const Eigen::Vector2d gj = grad_bary.row(j).transpose();
                const double c = F[i].d1 * F[j].d1 * F[r].f;
                jet.hess += c * Eigen::Vector3d(gi(0) * gj(0), 0.5 * (gi(0) * gj(1) + gi(1) * gj(0)), gi(1) * gj(1));
            }
        }
    }
}

}  // namespace hreig
