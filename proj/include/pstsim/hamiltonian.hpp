#ifndef PSTSIM_HAMILTONIAN_HPP
#define PSTSIM_HAMILTONIAN_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pstsim/network.hpp"

namespace pstsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Two operator representations are maintained side by side:
//  - Full: the 2^N computational basis, site i mapped to bit i (LSB = site 0).
//  - SingleExcitation: the (N+1)-dimensional sector spanned by the all-down
//    state (index 0) and the states with exactly one spin up (index i+1).
// All the generators built here commute with the total z-magnetization, so the
// single-excitation sector is closed and the two representations agree on it.
enum class Basis { Full, SingleExcitation };

// Full-basis matrices are dense; past this the memory cost is pointless
// for a desk-scale tool.
inline constexpr int kMaxFullBasisSites = 12;

Eigen::Index basis_dimension(Basis basis, int num_sites);

enum class Axis { X, Y, Z };

struct OperatorMatrix {
    CMatrix data;
    Basis basis = Basis::SingleExcitation;
    int num_sites = 0;
    bool hermitian = false;

    Eigen::Index dim() const { return data.rows(); }
};

// Largest elementwise deviation from M = M^dagger.
double hermiticity_defect(const CMatrix& m);

// Spin operators are Pauli/2; couplings enter as 2*pi*J_ij (rad/s).
//   Zeeman:  sum_{i not excluded} DeltaOmega_i I_i^z
//   XY:      sum_(i<j) 2*pi*J_ij (I_i^x I_j^x + I_i^y I_j^y)
//   ZZ:      sum_(i<j) 2*pi*J_ij I_i^z I_j^z
OperatorMatrix build_zeeman(const SpinNetwork& net, const std::vector<int>& excluded,
                            Basis basis);
// nullopt selects every coupled pair; an explicit list must be a subset of them.
OperatorMatrix build_xy(const SpinNetwork& net,
                        const std::optional<std::vector<std::pair<int, int>>>& pairs,
                        Basis basis);
OperatorMatrix build_zz(const SpinNetwork& net, Basis basis);

// sum_i I_i^axis for the given axis; X/Y exist only in the full basis.
OperatorMatrix collective_generator(int num_sites, Axis axis, Basis basis);

struct RecipeTerm {
    enum class Kind { Zeeman, XY, ZZ };
    Kind kind = Kind::Zeeman;
    double scale = 1.0;
    std::vector<int> excluded;                                   // Zeeman only
    std::optional<std::vector<std::pair<int, int>>> pairs;       // XY only
};

// A declarative sum of scaled generator terms. Recipes are the unit of
// caching in schedule execution, so key() must be canonical.
struct HamiltonianRecipe {
    std::vector<RecipeTerm> terms;

    static HamiltonianRecipe zeeman(std::vector<int> excluded = {}, double scale = 1.0);
    static HamiltonianRecipe xy(std::optional<std::vector<std::pair<int, int>>> pairs = std::nullopt,
                                double scale = 1.0);
    static HamiltonianRecipe zz(double scale = 1.0);

    HamiltonianRecipe& add(RecipeTerm term);

    void validate(const SpinNetwork& net) const;
    std::string key() const;
};

OperatorMatrix assemble(const HamiltonianRecipe& recipe, const SpinNetwork& net,
                        Basis basis);

// Restriction of a full-basis operator to the zero/single-excitation sector,
// ordered like the SingleExcitation basis. Cross-check use only.
CMatrix project_to_single_excitation(const OperatorMatrix& full);

} // namespace pstsim

#endif
