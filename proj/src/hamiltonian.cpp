#include "pstsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pstsim {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_full_size(int num_sites) {
    if (num_sites > kMaxFullBasisSites)
        throw ValidationError("full basis limited to " + std::to_string(kMaxFullBasisSites) +
                              " sites, got " + std::to_string(num_sites));
}

std::vector<std::pair<int, int>> resolve_pairs(
    const SpinNetwork& net, const std::optional<std::vector<std::pair<int, int>>>& pairs) {
    std::vector<std::pair<int, int>> out;
    if (!pairs) {
        for (const auto& c : net.couplings()) out.emplace_back(c.i, c.j);
        return out;
    }
    for (auto [i, j] : *pairs) {
        if (i > j) std::swap(i, j);
        if (!net.coupled(i, j))
            throw ValidationError("pair (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not coupled in the network");
        out.emplace_back(i, j);
    }
    return out;
}

std::string fmt_scale(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Eigen::Index basis_dimension(Basis basis, int num_sites) {
    if (num_sites < 1) throw ValidationError("basis needs at least one site");
    if (basis == Basis::Full) {
        check_full_size(num_sites);
        return Eigen::Index{1} << num_sites;
    }
    return num_sites + 1;
}

double hermiticity_defect(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix build_zeeman(const SpinNetwork& net, const std::vector<int>& excluded,
                            Basis basis) {
    const int n = net.num_sites();
    std::vector<bool> skip(n, false);
    for (int s : excluded) {
        if (s < 0 || s >= n)
            throw ValidationError("excluded site index " + std::to_string(s) + " out of range");
        skip[s] = true;
    }

    const Eigen::Index dim = basis_dimension(basis, n);
    CMatrix h = CMatrix::Zero(dim, dim);

    if (basis == Basis::Full) {
        for (Eigen::Index b = 0; b < dim; ++b) {
            double e = 0.0;
            for (int i = 0; i < n; ++i) {
                if (skip[i]) continue;
                e += net.shift_angular(i) * ((b >> i) & 1 ? 0.5 : -0.5);
            }
            h(b, b) = e;
        }
    } else {
        double vac = 0.0;
        for (int i = 0; i < n; ++i)
            if (!skip[i]) vac -= 0.5 * net.shift_angular(i);
        h(0, 0) = vac;
        for (int k = 0; k < n; ++k)
            h(k + 1, k + 1) = vac + (skip[k] ? 0.0 : net.shift_angular(k));
    }
    return {std::move(h), basis, n, true};
}

OperatorMatrix build_xy(const SpinNetwork& net,
                        const std::optional<std::vector<std::pair<int, int>>>& pairs,
                        Basis basis) {
    const int n = net.num_sites();
    const auto active = resolve_pairs(net, pairs);
    const Eigen::Index dim = basis_dimension(basis, n);
    CMatrix h = CMatrix::Zero(dim, dim);

    if (basis == Basis::Full) {
        for (const auto& [i, j] : active) {
            const double half = 0.5 * net.coupling_angular(i, j); // flip-flop element
            const Eigen::Index mi = Eigen::Index{1} << i;
            const Eigen::Index mj = Eigen::Index{1} << j;
            for (Eigen::Index b = 0; b < dim; ++b) {
                if (((b & mi) != 0) && ((b & mj) == 0)) {
                    const Eigen::Index bp = (b & ~mi) | mj;
                    h(bp, b) += half;
                    h(b, bp) += half;
                }
            }
        }
    } else {
        for (const auto& [i, j] : active) {
            const double half = 0.5 * net.coupling_angular(i, j);
            h(i + 1, j + 1) += half;
            h(j + 1, i + 1) += half;
        }
    }
    return {std::move(h), basis, n, true};
}

OperatorMatrix build_zz(const SpinNetwork& net, Basis basis) {
    const int n = net.num_sites();
    const Eigen::Index dim = basis_dimension(basis, n);
    CMatrix h = CMatrix::Zero(dim, dim);

    if (basis == Basis::Full) {
        for (Eigen::Index b = 0; b < dim; ++b) {
            double e = 0.0;
            for (const auto& c : net.couplings()) {
                const bool bi = (b >> c.i) & 1;
                const bool bj = (b >> c.j) & 1;
                e += hz_to_angular(c.j_hz) * (bi == bj ? 0.25 : -0.25);
            }
            h(b, b) = e;
        }
    } else {
        double vac = 0.0;
        for (const auto& c : net.couplings()) vac += 0.25 * hz_to_angular(c.j_hz);
        h(0, 0) = vac;
        for (int k = 0; k < n; ++k) {
            double e = vac;
            for (const auto& c : net.couplings())
                if (c.i == k || c.j == k) e -= 0.5 * hz_to_angular(c.j_hz);
            h(k + 1, k + 1) = e;
        }
    }
    return {std::move(h), basis, n, true};
}

OperatorMatrix collective_generator(int num_sites, Axis axis, Basis basis) {
    const Eigen::Index dim = basis_dimension(basis, num_sites);
    CMatrix g = CMatrix::Zero(dim, dim);

    if (basis == Basis::SingleExcitation) {
        if (axis != Axis::Z)
            throw ValidationError(
                "x/y collective rotations leave the single-excitation sector; "
                "use the full basis");
        g(0, 0) = -0.5 * num_sites;
        for (int k = 0; k < num_sites; ++k) g(k + 1, k + 1) = -0.5 * num_sites + 1.0;
        return {std::move(g), basis, num_sites, true};
    }

    for (int i = 0; i < num_sites; ++i) {
        const Eigen::Index m = Eigen::Index{1} << i;
        for (Eigen::Index b = 0; b < dim; ++b) {
            const bool up = (b & m) != 0;
            switch (axis) {
            case Axis::Z:
                g(b, b) += up ? 0.5 : -0.5;
                break;
            case Axis::X:
                g(b ^ m, b) += 0.5;
                break;
            case Axis::Y:
                // sigma_y/2: |1><0| carries +i/2, |0><1| carries -i/2
                g(b ^ m, b) += up ? -0.5 * kI : 0.5 * kI;
                break;
            }
        }
    }
    return {std::move(g), basis, num_sites, true};
}

HamiltonianRecipe HamiltonianRecipe::zeeman(std::vector<int> excluded, double scale) {
    HamiltonianRecipe r;
    r.terms.push_back({RecipeTerm::Kind::Zeeman, scale, std::move(excluded), std::nullopt});
    return r;
}

HamiltonianRecipe HamiltonianRecipe::xy(std::optional<std::vector<std::pair<int, int>>> pairs,
                                        double scale) {
    HamiltonianRecipe r;
    r.terms.push_back({RecipeTerm::Kind::XY, scale, {}, std::move(pairs)});
    return r;
}

HamiltonianRecipe HamiltonianRecipe::zz(double scale) {
    HamiltonianRecipe r;
    r.terms.push_back({RecipeTerm::Kind::ZZ, scale, {}, std::nullopt});
    return r;
}

HamiltonianRecipe& HamiltonianRecipe::add(RecipeTerm term) {
    terms.push_back(std::move(term));
    return *this;
}

void HamiltonianRecipe::validate(const SpinNetwork& net) const {
    if (terms.empty()) throw ValidationError("recipe has no terms");
    for (const auto& t : terms) {
        if (!std::isfinite(t.scale)) throw ValidationError("recipe term scale not finite");
        for (int s : t.excluded)
            if (s < 0 || s >= net.num_sites())
                throw ValidationError("recipe excludes site index out of range");
        if (t.pairs) resolve_pairs(net, t.pairs); // throws on uncoupled pairs
    }
}

std::string HamiltonianRecipe::key() const {
    std::string k;
    for (const auto& t : terms) {
        if (!k.empty()) k += "+";
        switch (t.kind) {
        case RecipeTerm::Kind::Zeeman: {
            k += "Z";
            if (!t.excluded.empty()) {
                auto sorted = t.excluded;
                std::sort(sorted.begin(), sorted.end());
                k += "[excl=";
                for (std::size_t i = 0; i < sorted.size(); ++i)
                    k += (i ? "," : "") + std::to_string(sorted[i]);
                k += "]";
            }
            break;
        }
        case RecipeTerm::Kind::XY: {
            k += "XY";
            if (t.pairs) {
                auto sorted = *t.pairs;
                for (auto& p : sorted)
                    if (p.first > p.second) std::swap(p.first, p.second);
                std::sort(sorted.begin(), sorted.end());
                k += "[pairs=";
                for (std::size_t i = 0; i < sorted.size(); ++i)
                    k += (i ? ";" : "") + std::to_string(sorted[i].first) + "-" +
                         std::to_string(sorted[i].second);
                k += "]";
            }
            break;
        }
        case RecipeTerm::Kind::ZZ:
            k += "ZZ";
            break;
        }
        k += "x" + fmt_scale(t.scale);
    }
    return k;
}

OperatorMatrix assemble(const HamiltonianRecipe& recipe, const SpinNetwork& net,
                        Basis basis) {
    recipe.validate(net);
    const Eigen::Index dim = basis_dimension(basis, net.num_sites());
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto& t : recipe.terms) {
        switch (t.kind) {
        case RecipeTerm::Kind::Zeeman:
            h += t.scale * build_zeeman(net, t.excluded, basis).data;
            break;
        case RecipeTerm::Kind::XY:
            h += t.scale * build_xy(net, t.pairs, basis).data;
            break;
        case RecipeTerm::Kind::ZZ:
            h += t.scale * build_zz(net, basis).data;
            break;
        }
    }
    return {std::move(h), basis, net.num_sites(), true};
}

CMatrix project_to_single_excitation(const OperatorMatrix& full) {
    if (full.basis != Basis::Full)
        throw ValidationError("projection expects a full-basis operator");
    const int n = full.num_sites;
    std::vector<Eigen::Index> sector;
    sector.push_back(0);
    for (int i = 0; i < n; ++i) sector.push_back(Eigen::Index{1} << i);

    CMatrix out(n + 1, n + 1);
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) out(r, c) = full.data(sector[r], sector[c]);
    return out;
}

} // namespace pstsim
